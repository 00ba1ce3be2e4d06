"""k-step counterfactual equivalence and the induced partitions.

Two programs are counterfactually equivalent at k over an input universe when
their first k semantic states agree on every tape in the universe, not just
on one actual input.  Agreement covers registers, input cursor, outputs,
halting, and the step's emulation event, but never the structural program
position, so distinct texts can be equivalent and (the interesting converse)
programs that coincide on one tape can still be inequivalent.

Partitions are grouped by a canonical serialization of the whole per-tape
trace family; class indices come from sorting those keys, so the result is
independent of input order and parallelism.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .encoding import Program
from .machine import run_trace, state_to_data
from .parallel import parallel_map

Tape = tuple[int, ...]


def _canonical_tapes(tapes) -> tuple[Tape, ...]:
    seen = set()
    unique = []
    for tape in tapes:
        t = tuple(tape)
        if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in t):
            raise ValueError(f"tape {t!r} must contain only naturals")
        if t not in seen:
            seen.add(t)
            unique.append(t)
    if not unique:
        raise ValueError("input universe must contain at least one tape")
    unique.sort(key=lambda t: (len(t), t))
    return tuple(unique)


@dataclass(frozen=True)
class InputUniverse:
    """The finite set of tapes the counterfactual quantifies over."""

    tapes: tuple[Tape, ...]
    universe_id: str

    @staticmethod
    def from_tapes(tapes, universe_id: str | None = None) -> "InputUniverse":
        canonical = _canonical_tapes(tapes)
        if universe_id is None:
            digest = hashlib.sha256(
                json.dumps([list(t) for t in canonical], separators=(",", ":")).encode()
            ).hexdigest()
            universe_id = f"sha256:{digest[:12]}"
        return InputUniverse(tapes=canonical, universe_id=universe_id)


# All tapes over {0,1} of length <= 2, canonically ordered.
DEFAULT_UNIVERSE = InputUniverse.from_tapes(
    [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)], universe_id="default"
)


@dataclass(frozen=True)
class TraceFamily:
    """The k-step traces of one program across a whole universe."""

    traces: tuple[tuple, ...]  # per tape, in universe order
    canonical_key: str


def trace_family(program: Program, universe: InputUniverse, k: int) -> TraceFamily:
    traces = tuple(run_trace(program, tape, k).states for tape in universe.tapes)
    payload = [[state_to_data(s) for s in trace] for trace in traces]
    key = json.dumps(payload, separators=(",", ":"))
    return TraceFamily(traces=traces, canonical_key=key)


def family_key(program: Program, universe: InputUniverse, k: int) -> str:
    return trace_family(program, universe, k).canonical_key


def counterfactually_equivalent(
    p: Program, q: Program, universe: InputUniverse, k: int
) -> bool:
    """True iff p and q produce identical k-step traces on every tape."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return all(
        run_trace(p, tape, k).states == run_trace(q, tape, k).states
        for tape in universe.tapes
    )


def key_digest(canonical_key: str) -> str:
    return hashlib.sha256(canonical_key.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class EquivClass:
    """One block of the partition at level k."""

    k: int
    index: int
    members: tuple[Program, ...]
    canonical_key: str
    universe_id: str
    member_bits: frozenset[str] = field(compare=False, hash=False, default=frozenset())

    @property
    def key_digest(self) -> str:
        return key_digest(self.canonical_key)


def _make_class(k, index, members, key, universe_id) -> EquivClass:
    members = tuple(sorted(members, key=lambda p: (p.length, p.bits)))
    return EquivClass(
        k=k,
        index=index,
        members=members,
        canonical_key=key,
        universe_id=universe_id,
        member_bits=frozenset(p.bits for p in members),
    )


def partition(
    programs,
    universe: InputUniverse,
    k: int,
    threads: int | None = None,
) -> list[EquivClass]:
    """Group programs by their k-step trace family over the universe.

    Classes are disjoint, cover the input, and carry indices derived from
    sorted canonical keys, so the same set of programs always yields the same
    partition no matter how it was ordered or how many workers computed it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    programs = list(programs)
    bits_seen = set()
    for program in programs:
        if program.bits in bits_seen:
            raise ValueError(f"duplicate program {program.bits!r} in partition input")
        bits_seen.add(program.bits)

    keys = parallel_map(lambda p: family_key(p, universe, k), programs, threads)
    groups: dict[str, list[Program]] = {}
    for program, key in zip(programs, keys):
        groups.setdefault(key, []).append(program)
    return [
        _make_class(k, index, members, key, universe.universe_id)
        for index, (key, members) in enumerate(sorted(groups.items()))
    ]


class RefinementViolation(RuntimeError):
    """A child class straddles two parent classes; this must be impossible."""


def refine(parents: list[EquivClass], children: list[EquivClass]) -> dict[int, int]:
    """Map each child class index at k+1 to its parent class index at k."""
    if not parents or not children:
        raise ValueError("refine needs nonempty partitions")
    parent_k = parents[0].k
    if children[0].k != parent_k + 1:
        raise ValueError(
            f"children are at k={children[0].k}, expected parents' k+1={parent_k + 1}"
        )
    parent_members = set().union(*(c.member_bits for c in parents))
    child_members = set().union(*(c.member_bits for c in children))
    if parent_members != child_members:
        raise ValueError("partitions do not cover the same program list")

    parent_of_bits = {bits: c.index for c in parents for bits in c.member_bits}
    mapping: dict[int, int] = {}
    for child in children:
        parent_indices = {parent_of_bits[bits] for bits in child.member_bits}
        if len(parent_indices) != 1:
            raise RefinementViolation(
                f"child class {child.index} at k={child.k} straddles parents {sorted(parent_indices)}"
            )
        mapping[child.index] = parent_indices.pop()
    return mapping
