"""The canonical dovetailing schedule and its runner.

Ticks sweep anti-diagonals of the (program index, step index) grid: diagonal
d covers ticks (d-1)(d-2)/2 + 1 .. d(d-1)/2 and runs step d-i of program i
for i ascending.  Every pair is reached at a predictable tick, which makes
fairness a testable closed form rather than a promise.

The same engine backs both the standalone runner below and the machine's DVT
instruction, so the two event streams agree by construction.  Children run on
empty tapes with zeroed registers and keep ticking after they halt (a halted
child's step is a no-op whose state keeps repeating); that way long-lived
hosts eventually witness arbitrarily many steps of every program.
"""

from __future__ import annotations

from math import isqrt

from .encoding import DVT, EncodingTable, TABLE_A, encode_instructions
from .enumeration import program_stream
from .machine import Configuration, EmulationEvent, step


def schedule_pair(tick: int) -> tuple[int, int]:
    """Map a 1-based tick to its (program index, step index) pair."""
    if tick < 1:
        raise ValueError("tick is 1-based and must be >= 1")
    # Smallest d >= 2 with tick <= d(d-1)/2; the isqrt guess is within one.
    d = max(2, (1 + isqrt(8 * tick)) // 2)
    while d * (d - 1) // 2 < tick:
        d += 1
    while (d - 1) * (d - 2) // 2 >= tick:
        d -= 1
    i = tick - (d - 1) * (d - 2) // 2
    return i, d - i


def canonical_dvt_bits(table: EncodingTable = TABLE_A) -> str:
    """Bits of the one-instruction dovetailer program under `table`."""
    return encode_instructions(((DVT,),), table)


class _Child:
    __slots__ = ("program", "config", "steps")

    def __init__(self, program) -> None:
        self.program = program
        self.config = Configuration.fresh(program)
        self.steps = 0


class DovetailEngine:
    """Mutable dovetailer state: one tick advances one child by one step."""

    def __init__(self, table: EncodingTable, host_bits: str) -> None:
        self.table = table
        self.host_bits = host_bits
        self.tick_index = 0
        self.children: dict[int, _Child] = {}
        self._stream = program_stream(table)

    def clone(self) -> "DovetailEngine":
        other = DovetailEngine(self.table, self.host_bits)
        other.tick_index = self.tick_index
        for index, child in self.children.items():
            copy = _Child(child.program)
            copy.config = child.config.clone()
            copy.steps = child.steps
            other.children[index] = copy
        return other

    def tick(self, events: list | None = None) -> EmulationEvent:
        self.tick_index += 1
        index, step_index = schedule_pair(self.tick_index)
        child = self.children.get(index)
        if child is None:
            child = self.children[index] = _Child(self._stream.nth(index))
        child_event = step(child.config, child.program, (), events)
        child.steps += 1
        assert child.steps == step_index
        event = EmulationEvent(
            host_bits=self.host_bits,
            code_bits=child.program.bits,
            step_index=step_index,
            state=child.config.semantic_state(child_event),
        )
        if events is not None:
            events.append(event)
        return event


def dovetail_run(ticks: int, table: EncodingTable = TABLE_A) -> list[EmulationEvent]:
    """Run `ticks` dovetailer ticks from scratch and return the event stream.

    The stream contains one event per tick plus any events the children
    themselves raise (nested emulators), innermost first, exactly as a host
    program executing DVT would produce.
    """
    if ticks < 0:
        raise ValueError("ticks must be >= 0")
    engine = DovetailEngine(table, host_bits=canonical_dvt_bits(table))
    events: list[EmulationEvent] = []
    for _ in range(ticks):
        engine.tick(events)
    return events
