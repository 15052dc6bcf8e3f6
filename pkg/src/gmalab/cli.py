"""Command-line front end.

    gmalab run <scenario.toml>
    gmalab demo <s3_p3|m2_full|cri1_suite|wl_suite|all>
    gmalab fuzz <gma|criterion> <count> --seed N

Reports are JSON with sorted keys.  Exit status: 0 when every invariant
holds, 1 when one fails (the report is still written), 2 for parse, schema
or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import errors
from .demos import DEMOS, run_demo
from .fuzz import FUZZERS
from .scenario import DEFAULT_MAX_ORDER, ORACLES, load, run

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--oracle", choices=ORACLES, default=None, help="brute-force cross-checks on or off")
    common.add_argument(
        "--max-order", type=int, default=None, metavar="CAP", help=f"largest |A| for exhaustive checks (default {DEFAULT_MAX_ORDER})"
    )
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds (breaks byte-identical output)")

    p = _Parser(prog="gmalab", description="Finite-level pseudocharacter, GMA, cohomology and R=T laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", parents=[common], help="run a scenario file")
    r.add_argument("file", type=Path)
    d = sub.add_parser("demo", parents=[common], help="run a built-in demo")
    d.add_argument("name", help=f"one of {', '.join(sorted(DEMOS) + ['all'])}")
    f = sub.add_parser("fuzz", parents=[common], help="seeded random instances")
    f.add_argument("kind", choices=sorted(FUZZERS))
    f.add_argument("count", type=int)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--fixtures", type=Path, default=None, help="directory for violating instances")
    return p


def _emit(report: dict, out: Path | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _fuzz(args) -> dict:
    if args.count < 1:
        raise errors.ScenarioError("count must be at least 1")
    if args.kind == "gma":
        report = FUZZERS["gma"](args.count, args.seed, oracle=args.oracle or "fast")
    else:
        report = FUZZERS[args.kind](args.count, args.seed)
    report["passed"] = not report["violations"]
    if args.fixtures is not None and report["violations"]:
        args.fixtures.mkdir(parents=True, exist_ok=True)
        for i, v in enumerate(report["violations"]):
            path = args.fixtures / f"{args.kind}-seed{args.seed}-{i}.json"
            path.write_text(json.dumps(v, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    start = time.perf_counter()
    try:
        if args.command == "run":
            report = run(load(args.file), oracle=args.oracle, max_order=args.max_order)
        elif args.command == "demo":
            report = run_demo(args.name, oracle=args.oracle or "exhaustive", max_order=args.max_order or DEFAULT_MAX_ORDER)
        else:
            report = _fuzz(args)
    except errors.GmaLabError as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        where = f"{args.file}: " if args.command == "run" else ""
        print(f"gmalab: {where}{msg}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    _emit(report, args.out)
    return EXIT_OK if report.get("passed", False) else EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
