import pytest

from udlab.dovetailer import DovetailEngine, canonical_dvt_bits, dovetail_run, schedule_pair
from udlab.encoding import TABLE_A, TABLE_B, decode
from udlab.machine import run_trace


def brute_force_pairs(count):
    """Independent oracle: walk the diagonals explicitly."""
    pairs = []
    d = 2
    while len(pairs) < count:
        for i in range(1, d):
            pairs.append((i, d - i))
        d += 1
    return pairs[:count]


def test_first_ticks():
    assert schedule_pair(1) == (1, 1)
    assert schedule_pair(2) == (1, 2)
    assert schedule_pair(3) == (2, 1)
    assert schedule_pair(5) == (2, 2)
    assert schedule_pair(6) == (3, 1)


def test_matches_brute_force_enumerator():
    oracle = brute_force_pairs(10_000)
    assert [schedule_pair(t) for t in range(1, 10_001)] == oracle


def test_bijective_over_tested_range():
    seen = set()
    for t in range(1, 5001):
        pair = schedule_pair(t)
        assert pair not in seen
        seen.add(pair)
    # After finishing diagonal D every pair with i+s <= D has been run.
    D = 100
    expected = {(i, s) for i in range(1, D) for s in range(1, D) if i + s <= D}
    assert {schedule_pair(t) for t in range(1, D * (D - 1) // 2 + 1)} == expected


def test_fairness_bound():
    # Pair (i, s) runs at tick (i+s-1)(i+s-2)/2 + i.
    for i in range(1, 40):
        for s in range(1, 40):
            tick = (i + s - 1) * (i + s - 2) // 2 + i
            assert schedule_pair(tick) == (i, s)


def test_completed_steps_after_full_diagonal():
    for D in (2, 5, 30):
        done: dict[int, int] = {}
        for t in range(1, D * (D - 1) // 2 + 1):
            i, _ = schedule_pair(t)
            done[i] = done.get(i, 0) + 1
        for i in range(1, D + 2):
            assert done.get(i, 0) == max(0, D - i)


def test_tick_validation():
    with pytest.raises(ValueError):
        schedule_pair(0)
    with pytest.raises(ValueError):
        dovetail_run(-1)


def test_single_tick():
    events = dovetail_run(1)
    assert len(events) == 1
    event = events[0]
    assert event.code_bits == "1111"
    assert event.step_index == 1
    assert event.state.halted


def test_three_ticks():
    events = dovetail_run(3)
    assert [(e.code_bits, e.step_index) for e in events] == [
        ("1111", 1),
        ("1111", 2),
        ("00001111", 1),
    ]


def test_zero_ticks():
    assert dovetail_run(0) == []


def test_dvt_instruction_agrees_with_runner():
    # The canonical host is the one-instruction dovetailer program itself, so
    # the two streams must be identical, hosts included.
    for ticks in (1, 7, 25):
        program = decode(canonical_dvt_bits(TABLE_A))
        assert list(run_trace(program, (), ticks).events) == dovetail_run(ticks)


def test_nested_dovetailers_emit_inner_events():
    # Tick 6 starts child 3, which is the dovetailer program; its first step
    # performs its own tick 1 and that inner event precedes the outer one.
    events = dovetail_run(6)
    assert len(events) == 7
    inner, outer = events[-2], events[-1]
    assert outer.code_bits == "10001111" and outer.step_index == 1
    assert inner.code_bits == "1111" and inner.step_index == 1
    assert outer.state.event is not None  # the child state carries its own event


def test_runs_are_independent():
    first = dovetail_run(10)
    second = dovetail_run(10)
    assert first == second


def test_engine_clone_is_detached():
    engine = DovetailEngine(TABLE_A, host_bits=canonical_dvt_bits(TABLE_A))
    for _ in range(6):
        engine.tick()
    copy = engine.clone()
    a = [engine.tick() for _ in range(5)]
    b = [copy.tick() for _ in range(5)]
    assert a == b


def test_encoding_b_runner_uses_b_bits():
    events = dovetail_run(3, TABLE_B)
    assert events[0].code_bits == "1111"
    assert events[0].host_bits == canonical_dvt_bits(TABLE_B) == "00001111"
    # Under B the second program is itself the dovetailer, so tick 3 yields
    # its inner tick-1 event followed by the outer event about it.
    assert len(events) == 4
    inner, outer = events[2], events[3]
    assert inner.code_bits == "1111" and inner.host_bits == "00001111"
    assert outer.code_bits == "00001111" and outer.step_index == 1
    assert not outer.state.halted
