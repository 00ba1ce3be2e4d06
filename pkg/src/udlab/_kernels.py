"""Backend selection for the hot kernels.

The compiled extension (udlab._speedups, built from Cython) accelerates the
two inner loops that dominate runtime: the exhaustive decode scan behind
program enumeration, and k-step tracing of programs without EXEC/DVT.  When
the extension is missing, or UDLAB_PURE=1 is set, everything runs on the
pure-Python routes, with identical results.
"""

from __future__ import annotations

import os
from functools import lru_cache

from . import _pykernels
from .encoding import DEC, DVT, EXEC, HALT, IN, INC, OUT, WHILE, EncodingTable, Program, decode

_speedups = None
if os.environ.get("UDLAB_PURE") != "1":
    try:
        from . import _speedups  # type: ignore[no-redef]
    except ImportError:
        _speedups = None

BACKEND = "compiled" if _speedups is not None else "pure"

# Registers stay below max(tape) + k, so these caps keep the compiled
# executor's 64-bit arithmetic exact.
_MAX_FAST_K = 2**31 - 1
_MAX_FAST_VALUE = 2**62

_FLAT_KIND = {
    HALT: _pykernels.K_HALT,
    INC: _pykernels.K_INC,
    DEC: _pykernels.K_DEC,
    OUT: _pykernels.K_OUT,
    IN: _pykernels.K_IN,
}


@lru_cache(maxsize=4096)
def flatten(program: Program):
    """Compile a meta-free program to (ops, regsel, jumps) slot arrays.

    WHILE occupies one slot whose jump targets the slot after its WEND; the
    WEND slot jumps back to the first body slot.  A final END slot marks the
    halt position.
    """
    if program.contains_meta:
        raise ValueError("only programs without EXEC/DVT can be flattened")
    ops: list[int] = []
    regsel: list[int] = []
    jumps: list[int] = []

    def emit(body: tuple) -> None:
        for instr in body:
            op = instr[0]
            if op == WHILE:
                while_slot = len(ops)
                ops.append(_pykernels.K_WHILE)
                regsel.append(instr[1])
                jumps.append(0)
                emit(instr[2])
                ops.append(_pykernels.K_WEND)
                regsel.append(instr[1])
                jumps.append(while_slot + 1)
                jumps[while_slot] = len(ops)
            else:
                ops.append(_FLAT_KIND[op])
                regsel.append(instr[1] if len(instr) > 1 else 0)
                jumps.append(0)

    emit(program.instructions)
    ops.append(_pykernels.K_END)
    regsel.append(0)
    jumps.append(0)
    return tuple(ops), tuple(regsel), tuple(jumps)


def flat_trace(program: Program, tape, k: int, backend: str | None = None):
    """Fast k-step trace rows for a meta-free program, or None when the
    compiled backend is unavailable or the inputs exceed its exact range."""
    which = BACKEND if backend is None else backend
    if which != "compiled" or _speedups is None:
        return None
    if program.contains_meta or k > _MAX_FAST_K:
        return None
    for value in tape:
        if value < 0 or value >= _MAX_FAST_VALUE:
            return None
    ops, regsel, jumps = flatten(program)
    return _speedups.exec_flat(ops, regsel, jumps, tuple(tape), k)


def scan_length(length: int, table: EncodingTable, backend: str | None = None) -> list[str]:
    """All valid program bit strings of exactly `length` bits, lexicographic."""
    which = BACKEND if backend is None else backend
    if which == "compiled" and _speedups is not None and length <= 60:
        candidates = _speedups.scan_length(length, tuple(_pykernels.opcode_kinds(table)))
        # The compiled validator only filters; the strict decoder stays the
        # single source of truth for what the accepted strings mean.
        for bits in candidates:
            decode(bits, table)
        return candidates
    return _pykernels.scan_length(length, table)
