import os

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure-Python
# implementations in udlab._pykernels when the extension is absent.
ext_modules = []
if os.environ.get("UDLAB_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("udlab._speedups", ["src/udlab/_speedups.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
