"""Config-driven experiment runner.

    stovaq run --config cfg.txt --out results/
    stovaq validate --config cfg.txt
    stovaq list-scenarios

Exit codes: 0 all metrics passed; 1 some metric failed; 2 config
parse/validation error; 3 numerical failure. STOVAQ_THREADS bounds the
kernel thread pool and must not change any result; STOVAQ_NUMBA=0 selects
the pure-NumPy kernels.
"""

import argparse
import sys
from pathlib import Path

from . import config as cfgmod
from .scenarios import RUNNERS, SCHEMAS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stovaq", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write CSV + report.json")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", required=True)

    val_p = sub.add_parser("validate", help="check a config without running numerics")
    val_p.add_argument("--config", required=True)

    sub.add_parser("list-scenarios", help="print available scenarios")
    return parser


def _load_and_validate(path: str):
    raw = cfgmod.load(path)
    normalized, errors = cfgmod.validate(raw, SCHEMAS)
    return normalized, errors


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-scenarios":
        for name in sorted(RUNNERS):
            print(name)
        return 0

    try:
        normalized, errors = _load_and_validate(args.config)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if errors:
        for err in errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"config ok: scenario={normalized['scenario']}")
        return 0

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        report = RUNNERS[normalized["scenario"]](normalized, out_dir)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    report.write(out_dir)
    for m in report.metrics:
        status = "PASS" if m.passed else "FAIL"
        print(f"{status} {m.name}: {m.value:.6g} (tolerance {m.comparator} {m.tolerance:.6g})")
    print(f"report: {out_dir / 'report.json'}")
    return 0 if report.all_pass else 1


if __name__ == "__main__":
    raise SystemExit(main())
