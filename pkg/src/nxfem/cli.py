"""Command-line driver: ``nxfem-bench {table1,table2,table3,table4,all}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import (
    TABLES,
    ExperimentConfig,
    ExperimentError,
    csv_text,
    parse_config,
    summary,
)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nxfem-bench",
        description="Condition numbers and CG iteration counts for Nitsche-XFEM subspace preconditioners.",
    )
    ap.add_argument("experiment", choices=[*TABLES, "all"])
    ap.add_argument("--config", metavar="PATH", help="flat key = value config file")
    ap.add_argument("--levels", help="comma-separated level list, e.g. 1,2,3")
    ap.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    ap.add_argument("--kappa-method", choices=["dense", "lanczos", "auto", "none"])
    ap.add_argument("--smoother", choices=["jacobi", "sgs", "both"], help="xfem block smoother in 3D")
    ap.add_argument("--eps", type=float, metavar="EXPONENT", help="interface shift 2**-EXPONENT")
    ap.add_argument("--no-timing", action="store_true", help="write wall_ms = 0 for reproducible CSV")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def config_for(name: str, args, text: str) -> ExperimentConfig:
    base = ExperimentConfig.reference_3d() if name == "table4" else ExperimentConfig()
    over = {}
    if args.levels is not None:
        over["levels"] = [int(t) for t in args.levels.split(",") if t.strip()]
    if args.kappa_method:
        over["kappa_method"] = args.kappa_method
    if args.smoother:
        over["smoother"] = args.smoother
    if args.eps is not None:
        over["shift"] = 2.0 ** -args.eps
    if args.no_timing:
        over["record_timing"] = False
    return parse_config(text, base=base, **over)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    names = list(TABLES) if args.experiment == "all" else [args.experiment]
    rows, out, max_iter = [], None, 3000
    try:
        for name in names:
            cfg = config_for(name, args, text)
            out = args.out or cfg.out or out
            max_iter = cfg.max_iter
            rows += TABLES[name](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3

    data = csv_text(rows, max_iter)
    if out:
        with open(out, "w") as fh:
            fh.write(data)
        print(summary(rows, max_iter))
    else:
        sys.stdout.write(data)
        print(summary(rows, max_iter), file=sys.stderr)

    # the unpreconditioned baseline is allowed to hit the cap
    failed = [r for r in rows if not r.converged and r.preconditioner != "I"]
    for r in failed:
        print(
            f"solver failure: {r.experiment} L{r.level} {r.preconditioner} did not converge "
            f"in {max_iter} iterations",
            file=sys.stderr,
        )
    return 3 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
