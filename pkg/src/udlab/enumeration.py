"""Canonical enumeration of the program set and its Kraft masses.

The canonical order is length first, then lexicographic on bits.  Enumeration
is by exhaustive decode of every bit string up to the requested length; the
compiled backend only accelerates the scan, it cannot change its result.
Streams cache per encoding variant and extend lazily, so the n-th program is
available without choosing a length bound up front.
"""

from __future__ import annotations

import threading
from bisect import bisect_right
from fractions import Fraction

from . import _kernels
from .encoding import MIN_PROGRAM_BITS, EncodingTable, Program, TABLE_A, decode


class ProgramStream:
    """Lazily extended canonical enumeration for one encoding variant."""

    def __init__(self, table: EncodingTable) -> None:
        self.table = table
        self._programs: list[Program] = []
        self._lengths: list[int] = []
        self._scanned_to = 0  # every length <= this has been scanned
        self._lock = threading.Lock()

    def _extend_to_length(self, max_len: int) -> None:
        with self._lock:
            while self._scanned_to < max_len:
                length = self._scanned_to + 1
                if length >= MIN_PROGRAM_BITS:
                    for bits in _kernels.scan_length(length, self.table):
                        self._programs.append(decode(bits, self.table))
                        self._lengths.append(length)
                self._scanned_to = length

    def up_to_length(self, max_len: int) -> list[Program]:
        if max_len < MIN_PROGRAM_BITS:
            raise ValueError(f"max_len must be >= {MIN_PROGRAM_BITS}")
        self._extend_to_length(max_len)
        return self._programs[: bisect_right(self._lengths, max_len)]

    def nth(self, n: int) -> Program:
        if n < 1:
            raise ValueError("program index is 1-based and must be >= 1")
        while len(self._programs) < n:
            self._extend_to_length(self._scanned_to + 1)
        return self._programs[n - 1]


_STREAMS: dict[str, ProgramStream] = {}
_STREAMS_LOCK = threading.Lock()


def program_stream(table: EncodingTable = TABLE_A) -> ProgramStream:
    """The shared enumeration stream for an encoding variant."""
    with _STREAMS_LOCK:
        stream = _STREAMS.get(table.variant_id)
        if stream is None:
            stream = _STREAMS[table.variant_id] = ProgramStream(table)
        return stream


def enumerate_programs(max_len: int, table: EncodingTable = TABLE_A) -> list[Program]:
    """All valid programs with length <= max_len, in canonical order."""
    return program_stream(table).up_to_length(max_len)


def nth_program(n: int, table: EncodingTable = TABLE_A) -> Program:
    """The n-th program (1-based) in canonical order."""
    return program_stream(table).nth(n)


def kraft_mass(max_len: int, table: EncodingTable = TABLE_A) -> Fraction:
    """Exact total weight of the enumerated prefix: sum of 2**-length."""
    total = Fraction(0)
    for program in enumerate_programs(max_len, table):
        total += Fraction(1, 2**program.length)
    return total
