#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python routes.

Times the two workloads the kernels exist for: the exhaustive decode scan
behind enumeration, and k-step tracing of meta-free programs (the inner loop
of partitioning).  Correctness of the compiled routes is asserted against the
pure ones on every run; speed is whatever it is on your machine.

Usage: python benchmarks/compare_backends.py [--scan-len 18] [--trace-len 14] [-k 8]
"""

import argparse
import time

from udlab import _kernels, _pykernels
from udlab.encoding import TABLE_A
from udlab.enumeration import enumerate_programs
from udlab.equivalence import DEFAULT_UNIVERSE
from udlab.machine import Configuration, step


def tree_states(program, tape, k):
    config = Configuration.fresh(program)
    rows = []
    for _ in range(k):
        event = step(config, program, tape)
        rows.append(config.semantic_state(event))
    return rows


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def bench_scan(length: int) -> None:
    pure, pure_s = timed(lambda: _pykernels.scan_length(length, TABLE_A))
    line = f"scan L={length:<3} {len(pure):>6} programs   pure {pure_s:8.3f}s"
    if _kernels.BACKEND == "compiled":
        fast, fast_s = timed(lambda: _kernels.scan_length(length, TABLE_A, backend="compiled"))
        assert fast == pure
        line += f"   compiled {fast_s:8.3f}s   speedup {pure_s / max(fast_s, 1e-9):6.1f}x"
    print(line)


def bench_traces(max_len: int, k: int) -> None:
    programs = [p for p in enumerate_programs(max_len) if not p.contains_meta]
    tapes = DEFAULT_UNIVERSE.tapes

    def pure_run():
        return [tree_states(p, tape, k) for p in programs for tape in tapes]

    pure, pure_s = timed(pure_run)
    line = (
        f"trace L<={max_len} k={k}  {len(programs) * len(tapes):>6} runs       "
        f"pure {pure_s:8.3f}s"
    )
    if _kernels.BACKEND == "compiled":

        def fast_run():
            out = []
            for p in programs:
                for tape in tapes:
                    raw = _kernels.flat_trace(p, tape, k)
                    assert raw is not None
                    out.append(raw)
            return out

        fast, fast_s = timed(fast_run)
        for rows_fast, states_pure in zip(fast, pure):
            rows, outs = rows_fast
            for row, state in zip(rows, states_pure):
                assert tuple(row[:4]) == state.registers and bool(row[6]) == state.halted
        line += f"   compiled {fast_s:8.3f}s   speedup {pure_s / max(fast_s, 1e-9):6.1f}x"
    print(line)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scan-len", type=int, default=18)
    parser.add_argument("--trace-len", type=int, default=14)
    parser.add_argument("-k", type=int, default=8)
    args = parser.parse_args()

    print(f"selected backend: {_kernels.BACKEND}")
    if _kernels.BACKEND != "compiled":
        print("compiled extension not available; timing the pure route only")
    for length in (args.scan_len - 4, args.scan_len - 2, args.scan_len):
        bench_scan(length)
    bench_traces(args.trace_len, args.k)
    bench_traces(args.trace_len + 2, args.k)


if __name__ == "__main__":
    main()
