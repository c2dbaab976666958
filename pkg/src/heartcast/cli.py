"""Command-line front end: scenario files in, deterministic reports out.

Exit codes are a stable API: 0 success, 2 I/O failure, 3 scenario
validation failure, 4 insufficient data after all relaxations.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .emit import report_json_bytes, write_csv_bundle
from .errors import InsufficientDataError, ValidationError
from .forecast import run_forecast
from .scenario import parse_scenario

EXIT_OK = 0
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_INSUFFICIENT_DATA = 4


def thread_cap() -> int:
    """Worker cap from HEARTCAST_THREADS (>= 1). The engine is vectorized and
    evaluation-order independent, so results never depend on this value."""
    raw = os.environ.get("HEARTCAST_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"HEARTCAST_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ValidationError("HEARTCAST_THREADS must be >= 1")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heartcast", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fc = sub.add_parser("forecast", help="run one scenario file to a report")
    fc.add_argument("--scenario", required=True, help="scenario JSON file")
    fc.add_argument("--out", required=True, help="output report path (file or csv-bundle dir)")
    fc.add_argument("--emit", choices=["json", "csv-bundle"], default="json")
    fc.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    fc.add_argument("--mc-suitors", type=int, default=None, help="override mc.suitors")
    fc.add_argument("--mc-realizations", type=int, default=None, help="override mc.realizations")
    fc.add_argument("-v", "--verbose", action="store_true")

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--port", type=int, default=8787)
    sv.add_argument("--bind", default="127.0.0.1")
    return parser


def _run_forecast_command(args) -> int:
    try:
        with open(args.scenario, "r", encoding="utf-8") as handle:
            raw = handle.read()
    except OSError as exc:
        print(f"error: cannot read scenario {args.scenario!r}: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: scenario {args.scenario!r} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        thread_cap()
        scenario = parse_scenario(data, base_dir=os.path.dirname(os.path.abspath(args.scenario)))
        if args.seed is not None:
            scenario = dataclasses.replace(scenario, seed=args.seed)
        if args.mc_suitors is not None or args.mc_realizations is not None:
            mc = dataclasses.replace(
                scenario.mc,
                **{
                    key: value
                    for key, value in (
                        ("suitors", args.mc_suitors),
                        ("realizations", args.mc_realizations),
                    )
                    if value is not None
                },
            )
            scenario = dataclasses.replace(scenario, mc=mc)
    except ValidationError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        if args.verbose:
            print(
                f"running scenario seed={scenario.seed} groups={len(scenario.groups)} "
                f"suitors={scenario.mc.suitors} realizations={scenario.mc.realizations}",
                file=sys.stderr,
            )
        report = run_forecast(scenario)
    except InsufficientDataError as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        for step in exc.relaxation_log:
            print(f"  relaxation step {step.step}: {step.action} -> {step.count}", file=sys.stderr)
        return EXIT_INSUFFICIENT_DATA
    except ValidationError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        if args.emit == "json":
            parent = os.path.dirname(os.path.abspath(args.out))
            os.makedirs(parent, exist_ok=True)
            with open(args.out, "wb") as handle:
                handle.write(report_json_bytes(report))
            if args.verbose:
                print(f"wrote {args.out}", file=sys.stderr)
        else:
            written = write_csv_bundle(report, args.out)
            if args.verbose:
                print(f"wrote {len(written)} files under {args.out}", file=sys.stderr)
    except OSError as exc:
        print(f"error: cannot write output {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _run_serve_command(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.bind, port=args.port, log_level="info")
    return EXIT_OK


def execute(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    if args.command == "forecast":
        return _run_forecast_command(args)
    return _run_serve_command(args)


def main():  # console entry point
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
