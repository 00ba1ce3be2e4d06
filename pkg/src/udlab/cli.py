"""Batch command-line front end.

Every subcommand is a pure function of its resolved run configuration: output
is byte-identical across repeated runs and across worker counts, all numbers
are exact fraction strings, and each emitted result embeds the configuration
that produced it.  Exit codes: 0 success, 1 usage error, 2 validation or
precondition failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .dovetailer import DovetailEngine, canonical_dvt_bits, schedule_pair
from .encoding import DecodeError, EncodingTable, decode, get_table
from .enumeration import enumerate_programs, kraft_mass
from .equivalence import DEFAULT_UNIVERSE, InputUniverse, partition, refine
from .machine import state_to_data
from .measure import (
    MeasureContext,
    decomposition_check,
    divergence_report,
    fraction_str,
    level_partition,
    measure_class,
    relative_measure,
)
from .parallel import resolve_threads
from .replay import (
    SeverancePlan,
    hybrid_run,
    playback,
    record,
    recording_from_data,
    recording_to_data,
    sever_and_project,
)

DEFAULT_MAX_LEN = 12
DEFAULT_K = 2
DEFAULT_BUDGET = 1000

_COMMANDS = (
    "enumerate",
    "kraft",
    "schedule",
    "dovetail",
    "partition",
    "measure",
    "decompose",
    "relmeasure",
    "levels",
    "record",
    "replay",
    "hybrid",
    "sever",
    "invariance",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; here usage errors are 1
    # and 2 is reserved for validation failures.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="udlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="|".join(_COMMANDS))
    for name in _COMMANDS:
        p = sub.add_parser(name, add_help=True)
        p.add_argument("--max-len", "-L", dest="max_len", type=int, default=None)
        p.add_argument("-k", dest="k", type=int, default=None)
        p.add_argument("--budget", "-T", dest="budget", type=int, default=None)
        p.add_argument("--universe", default=None, help="path to a JSON tape list, or 'default'")
        p.add_argument("--encoding", default=None, choices=("A", "B"))
        p.add_argument("--format", dest="fmt", default=None, choices=("csv", "json"))
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--tick", type=int, default=None)
        p.add_argument("--ticks", type=int, default=None)
        p.add_argument("--program", default=None, help="program bits ('0'/'1' string)")
        p.add_argument("--tape", default=None, help="comma-separated naturals, empty for ()")
        p.add_argument("--severed", default=None, help="comma-separated step indices")
        p.add_argument("--recording", default=None, help="path to a recording JSON file")
        p.add_argument("--config", default=None, help="JSON file of default option values")
    return parser


_CONFIG_KEYS = {
    "max_len",
    "k",
    "budget",
    "universe",
    "encoding",
    "fmt",
    "format",
    "out",
    "threads",
    "tick",
    "ticks",
    "program",
    "tape",
    "severed",
    "recording",
}


def _apply_config_file(args: argparse.Namespace) -> None:
    if args.config is None:
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise _UsageError("udlab: error: --config file must hold a JSON object")
    for key, value in values.items():
        if key not in _CONFIG_KEYS:
            raise _UsageError(f"udlab: error: unknown config key {key!r}")
        dest = "fmt" if key == "format" else key
        if getattr(args, dest) is None:  # explicit flags win over the file
            setattr(args, dest, value)


def _parse_tape(text: str | None) -> tuple[int, ...]:
    if text is None or text == "":
        return ()
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise ValueError(f"tape entry {part!r} is not a natural number")
        values.append(int(part))
    return tuple(values)


def _parse_severed(text: str | None) -> SeverancePlan:
    if text is None or text == "":
        return SeverancePlan.of(())
    return SeverancePlan.of(int(part) for part in text.split(","))


def _load_universe(source: str | None) -> InputUniverse:
    if source is None or source == "default":
        return DEFAULT_UNIVERSE
    with open(source, "r", encoding="utf-8") as fh:
        tapes = json.load(fh)
    if not isinstance(tapes, list):
        raise ValueError("universe file must hold a JSON list of tapes")
    return InputUniverse.from_tapes(tuple(tuple(t) for t in tapes))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_doc(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_doc(config: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


class _Run:
    """Resolved options for one invocation."""

    def __init__(self, args: argparse.Namespace, default_fmt: str) -> None:
        self.command = args.command
        self.max_len = DEFAULT_MAX_LEN if args.max_len is None else int(args.max_len)
        self.k = DEFAULT_K if args.k is None else int(args.k)
        self.budget = DEFAULT_BUDGET if args.budget is None else int(args.budget)
        self.universe = _load_universe(args.universe)
        self.encoding: EncodingTable = get_table(args.encoding or "A")
        self.threads = resolve_threads(None if args.threads is None else int(args.threads))
        self.fmt = args.fmt or default_fmt
        self.out = args.out
        self.args = args

    def config_dict(self, *extra: tuple[str, object]) -> dict:
        base = {
            "command": self.command,
            "max_len": self.max_len,
            "k": self.k,
            "budget": self.budget,
            "universe_id": self.universe.universe_id,
            "encoding": self.encoding.variant_id,
            "threads": self.threads,
            "format": self.fmt,
        }
        for key, value in extra:
            base[key] = value
        return base

    def context(self, k: int | None = None) -> MeasureContext:
        return MeasureContext(
            max_len=self.max_len,
            k=self.k if k is None else k,
            budget=self.budget,
            universe=self.universe,
            encoding=self.encoding,
        )


def _cmd_enumerate(run: _Run) -> None:
    programs = enumerate_programs(run.max_len, run.encoding)
    config = run.config_dict()
    if run.fmt == "json":
        _emit(_json_doc({"config": config, "programs": [p.bits for p in programs]}), run.out)
    else:
        rows = [[i + 1, p.bits, p.length] for i, p in enumerate(programs)]
        _emit(_csv_doc(config, ["index", "bits", "length"], rows), run.out)


def _cmd_kraft(run: _Run) -> None:
    mass = kraft_mass(run.max_len, run.encoding)
    if run.fmt == "json":
        _emit(_json_doc({"config": run.config_dict(), "kraft_mass": fraction_str(mass)}), run.out)
    elif run.fmt == "csv":
        rows = [[run.max_len, run.encoding.variant_id, fraction_str(mass)]]
        _emit(_csv_doc(run.config_dict(), ["max_len", "encoding", "kraft_mass"], rows), run.out)
    else:
        _emit(fraction_str(mass) + "\n", run.out)


def _cmd_schedule(run: _Run) -> None:
    if run.args.tick is None:
        raise ValueError("schedule requires --tick")
    tick = int(run.args.tick)
    i, s = schedule_pair(tick)
    config = run.config_dict(("tick", tick))
    if run.fmt == "json":
        _emit(_json_doc({"config": config, "tick": tick, "program_index": i, "step_index": s}), run.out)
    elif run.fmt == "csv":
        _emit(_csv_doc(config, ["tick", "program_index", "step_index"], [[tick, i, s]]), run.out)
    else:
        _emit(f"({i},{s})\n", run.out)


def _tick_rows(ticks: int, table: EncodingTable) -> list[list]:
    engine = DovetailEngine(table, host_bits=canonical_dvt_bits(table))
    rows = []
    for tick in range(1, ticks + 1):
        index, _ = schedule_pair(tick)
        event = engine.tick()
        state = event.state
        rows.append(
            [
                tick,
                index,
                event.code_bits,
                event.step_index,
                state.halted,
                " ".join(str(r) for r in state.registers),
                " ".join(str(v) for v in state.outputs),
            ]
        )
    return rows


def _cmd_dovetail(run: _Run) -> None:
    if run.args.ticks is None:
        raise ValueError("dovetail requires --ticks")
    ticks = int(run.args.ticks)
    if ticks < 0:
        raise ValueError("ticks must be >= 0")
    config = run.config_dict(("ticks", ticks))
    rows = _tick_rows(ticks, run.encoding)
    header = ["tick", "program_index", "program_bits", "step_index", "halted", "registers", "outputs"]
    if run.fmt == "json":
        events = [dict(zip(header, row)) for row in rows]
        _emit(_json_doc({"config": config, "events": events}), run.out)
    else:
        _emit(_csv_doc(config, header, rows), run.out)


def _partition_payload(run: _Run, k: int) -> list:
    programs = enumerate_programs(run.max_len, run.encoding)
    return partition(programs, run.universe, k, run.threads)


def _cmd_partition(run: _Run) -> None:
    classes = _partition_payload(run, run.k)
    config = run.config_dict()
    if run.fmt == "csv":
        rows = [
            [c.index, c.key_digest, len(c.members), ";".join(p.bits for p in c.members)]
            for c in classes
        ]
        _emit(_csv_doc(config, ["index", "canonical_key_digest", "size", "members"], rows), run.out)
    else:
        payload = {
            "config": config,
            "k": run.k,
            "universe_id": run.universe.universe_id,
            "classes": [
                {
                    "index": c.index,
                    "canonical_key_digest": c.key_digest,
                    "members": [p.bits for p in c.members],
                }
                for c in classes
            ],
        }
        _emit(_json_doc(payload), run.out)


def _context_columns(run: _Run, k: int) -> list:
    return [run.max_len, k, run.budget, run.universe.universe_id, run.encoding.variant_id]


_CONTEXT_HEADER = ["L", "k", "T", "universe_id", "encoding_id"]


def _cmd_measure(run: _Run) -> None:
    classes = _partition_payload(run, run.k)
    ctx = run.context()
    rows = [
        _context_columns(run, run.k)
        + [c.index, c.key_digest, len(c.members), fraction_str(measure_class(c, ctx, run.threads))]
        for c in classes
    ]
    header = _CONTEXT_HEADER + ["class_index", "key_digest", "member_count", "mass"]
    if run.fmt == "json":
        payload = {"config": run.config_dict(), "classes": [dict(zip(header, row)) for row in rows]}
        _emit(_json_doc(payload), run.out)
    else:
        _emit(_csv_doc(run.config_dict(), header, rows), run.out)


def _cmd_decompose(run: _Run) -> None:
    classes = _partition_payload(run, run.k)
    ctx = run.context()
    residuals = decomposition_check(classes, ctx, run.threads)
    rows = [
        _context_columns(run, run.k) + [c.index, fraction_str(r), r == 0]
        for c, r in zip(classes, residuals)
    ]
    header = _CONTEXT_HEADER + ["class_index", "residual", "zero"]
    if run.fmt == "json":
        payload = {"config": run.config_dict(), "classes": [dict(zip(header, row)) for row in rows]}
        _emit(_json_doc(payload), run.out)
    else:
        _emit(_csv_doc(run.config_dict(), header, rows), run.out)


def _relmeasure_rows(run: _Run, table: EncodingTable) -> list[list]:
    programs = enumerate_programs(run.max_len, table)
    parents = partition(programs, run.universe, run.k, run.threads)
    children = partition(programs, run.universe, run.k + 1, run.threads)
    mapping = refine(parents, children)
    ctx = MeasureContext(
        max_len=run.max_len, k=run.k, budget=run.budget, universe=run.universe, encoding=table
    )
    rows = []
    for child in children:
        parent = parents[mapping[child.index]]
        ratio = relative_measure(child, parent, ctx, run.threads)
        rows.append(
            [
                run.max_len,
                run.k,
                run.budget,
                run.universe.universe_id,
                table.variant_id,
                child.index,
                parent.index,
                child.key_digest,
                parent.key_digest,
                fraction_str(ratio),
            ]
        )
    return rows


_RELMEASURE_HEADER = _CONTEXT_HEADER + [
    "child_index",
    "parent_index",
    "child_digest",
    "parent_digest",
    "relative_measure",
]


def _cmd_relmeasure(run: _Run) -> None:
    rows = _relmeasure_rows(run, run.encoding)
    if run.fmt == "json":
        payload = {
            "config": run.config_dict(),
            "pairs": [dict(zip(_RELMEASURE_HEADER, row)) for row in rows],
        }
        _emit(_json_doc(payload), run.out)
    else:
        _emit(_csv_doc(run.config_dict(), _RELMEASURE_HEADER, rows), run.out)


def _cmd_levels(run: _Run) -> None:
    # -k is the top level; the report always starts at level 1.
    ctx = run.context(k=1)
    rows_data = divergence_report(1, run.k, ctx, run.threads)
    rows = [
        [run.max_len, row.k, run.budget, run.universe.universe_id, run.encoding.variant_id]
        + [row.class_count, fraction_str(row.level_mass), fraction_str(row.cumulative)]
        for row in rows_data
    ]
    header = _CONTEXT_HEADER + ["class_count", "level_mass", "cumulative"]
    if run.fmt == "json":
        payload = {"config": run.config_dict(), "levels": [dict(zip(header, row)) for row in rows]}
        _emit(_json_doc(payload), run.out)
    else:
        _emit(_csv_doc(run.config_dict(), header, rows), run.out)


def _cmd_record(run: _Run) -> None:
    if run.args.program is None:
        raise ValueError("record requires --program")
    program = decode(run.args.program, run.encoding)
    tape = _parse_tape(run.args.tape)
    rec = record(program, tape, run.k)
    payload = {"config": run.config_dict(("tape", list(tape)))}
    payload.update(recording_to_data(rec))
    _emit(_json_doc(payload), run.out)


def _load_recording(run: _Run):
    path = run.args.recording
    if path is None:
        raise ValueError(f"{run.command} requires --recording")
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    encoding = run.encoding
    if "config" in data and "encoding" in data["config"]:
        encoding = get_table(data["config"]["encoding"])
    return recording_from_data(data, encoding)


def _cmd_replay(run: _Run) -> None:
    rec = _load_recording(run)
    states = playback(rec)
    payload = {
        "config": run.config_dict(("recording", run.args.recording)),
        "k": rec.k,
        "trace": [state_to_data(s) for s in states],
    }
    _emit(_json_doc(payload), run.out)


def _cmd_hybrid(run: _Run) -> None:
    rec = _load_recording(run)
    result = hybrid_run(rec, _parse_tape(run.args.tape))
    payload = {
        "config": run.config_dict(
            ("recording", run.args.recording), ("tape", list(_parse_tape(run.args.tape)))
        ),
        "switch_step": result.switch_step,
        "trace": [state_to_data(s) for s in result.trace],
    }
    _emit(_json_doc(payload), run.out)


def _cmd_sever(run: _Run) -> None:
    rec = _load_recording(run)
    plan = _parse_severed(run.args.severed)
    tape = _parse_tape(run.args.tape)
    result = sever_and_project(rec, plan, tape, run.universe)
    payload = {
        "config": run.config_dict(
            ("recording", run.args.recording),
            ("tape", list(tape)),
            ("severed", sorted(plan.severed_steps)),
        ),
        "counterfactually_equivalent": result.equivalent,
        "trace": [state_to_data(s) for s in result.trace],
    }
    _emit(_json_doc(payload), run.out)


def _cmd_invariance(run: _Run) -> None:
    """Relative measures side by side under encodings A and B; nothing is
    asserted about their agreement, the table is the experiment."""
    rows = []
    for variant in ("A", "B"):
        rows.extend(_relmeasure_rows(run, get_table(variant)))
    if run.fmt == "json":
        payload = {
            "config": run.config_dict(),
            "pairs": [dict(zip(_RELMEASURE_HEADER, row)) for row in rows],
        }
        _emit(_json_doc(payload), run.out)
    else:
        _emit(_csv_doc(run.config_dict(), _RELMEASURE_HEADER, rows), run.out)


_HANDLERS = {
    "enumerate": (_cmd_enumerate, "json"),
    "kraft": (_cmd_kraft, "plain"),
    "schedule": (_cmd_schedule, "plain"),
    "dovetail": (_cmd_dovetail, "csv"),
    "partition": (_cmd_partition, "json"),
    "measure": (_cmd_measure, "csv"),
    "decompose": (_cmd_decompose, "csv"),
    "relmeasure": (_cmd_relmeasure, "csv"),
    "levels": (_cmd_levels, "csv"),
    "record": (_cmd_record, "json"),
    "replay": (_cmd_replay, "json"),
    "hybrid": (_cmd_hybrid, "json"),
    "sever": (_cmd_sever, "json"),
    "invariance": (_cmd_invariance, "csv"),
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        _apply_config_file(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help prints and exits 0
        return 0 if exc.code in (0, None) else 1

    handler, default_fmt = _HANDLERS[args.command]
    try:
        run = _Run(args, default_fmt)
        handler(run)
    except (DecodeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
