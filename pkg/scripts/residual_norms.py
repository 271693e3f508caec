"""CG iteration counts under the Euclidean and the preconditioned residual stopping tests."""

from nxfem.experiments import ExperimentConfig, TABLES


def main():
    for residual in ("euclidean", "preconditioned"):
        print(f"== {residual}")
        for name, run in TABLES.items():
            base = ExperimentConfig.reference_3d if name == "table4" else ExperimentConfig
            rows = run(base(residual=residual, kappa_method="none", record_timing=False))
            cells = {}
            for r in rows:
                cells.setdefault(r.preconditioner, []).append(str(r.iterations))
            for pc, its in cells.items():
                print(f"  {name} {pc:<9} {' '.join(its)}")


if __name__ == "__main__":
    main()
