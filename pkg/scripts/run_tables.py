"""Run all four tables and write one CSV per table into an output directory."""

import argparse
from pathlib import Path

from nxfem.experiments import TABLES, ExperimentConfig, load_config, summary, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--config", help="optional key = value overrides for the 2D tables")
    ap.add_argument("--no-timing", action="store_true")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, run in TABLES.items():
        if name == "table4":
            cfg = ExperimentConfig.reference_3d(record_timing=not args.no_timing)
        elif args.config:
            cfg = load_config(args.config, record_timing=not args.no_timing)
        else:
            cfg = ExperimentConfig(record_timing=not args.no_timing)
        rows = run(cfg)
        with open(out / f"{name}.csv", "w") as fh:
            write_csv(rows, fh, cfg.max_iter)
        print(summary(rows, cfg.max_iter), "\n")


if __name__ == "__main__":
    main()
