"""Command line entry point: ``lindblad-ep <command> --model FILE``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InconsistentVerdicts, LindbladEPError
from .modelfile import load
from .report import COMMANDS, ENV_PREFIX, Tolerances, emit_report, parse_grid, run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 3

EPILOG = f"""\
tolerances: --tol sets the verdict tolerance; the others come from the
model file "tolerances" object or from environment variables
{ENV_PREFIX}VERDICT, {ENV_PREFIX}EIG, {ENV_PREFIX}CUTOFF, {ENV_PREFIX}FAITHFUL,
{ENV_PREFIX}ZERO_EP, {ENV_PREFIX}INVARIANT.  Precedence: flag > environment >
file > default.  Every report echoes the tolerances it used.

grid: for sweep, FIELD[INDEX]=START:STOP:NUM or FIELD[INDEX]=V1,V2,...
with FIELD gamma_minus or gamma_plus; for oracle, a decreasing comma list
of times (default 1e-4,3e-5,...,1e-7).

exit codes: 0 success, 1 error, 2 usage, 3 inconsistent balance verdicts.
"""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lindblad-ep",
        description="Entropy production and detailed balance of stochastic-limit-type semigroups.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", required=True, type=Path, help="JSON model file")
    p.add_argument("--format", default=None, choices=("json", "human", "csv"), help="default: csv for sweep, json otherwise")
    p.add_argument("--tol", type=float, default=None, help="verdict tolerance")
    p.add_argument("--grid", default=None, help="sweep rate grid or oracle time grid")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    try:
        mf = load(args.model)
        tol = Tolerances.resolve(mf.tolerances, flags={"verdict": args.tol})
        options = {"tolerances": tol}
        if args.command == "sweep":
            if not args.grid:
                raise LindbladEPError("sweep needs --grid")
            options["grid"] = parse_grid(args.grid)
        elif args.grid:
            if args.command != "oracle":
                raise LindbladEPError("--grid is only used by sweep and oracle")
            try:
                options["t_grid"] = [float(x) for x in args.grid.split(",")]
            except ValueError:
                raise LindbladEPError(f"bad time grid {args.grid!r}") from None
        report = run(args.command, mf.model, options)
        data = emit_report(report, fmt)
    except InconsistentVerdicts as exc:
        print(f"lindblad-ep: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (LindbladEPError, OSError, ValueError) as exc:
        print(f"lindblad-ep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        args.out.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
