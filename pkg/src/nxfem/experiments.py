"""Condition-number and CG-iteration experiments on the rounded-box interface problem.

Each ``run_table*`` returns a list of :class:`Row`; :func:`write_csv` writes
them with a fixed column order.  Configs are flat ``key = value`` text files.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import time
import typing
from dataclasses import dataclass, field

import numpy as np

from .assembly import ProblemCoefficients
from .krylov import (
    IndefiniteError,
    estimate_condition_lanczos,
    exact_condition_dense,
    pcg,
    saturated_lanczos_condition,
)
from .mesh import level_subdivisions
from .preconditioners import LABELS
from .problem import Problem, build_problem

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "experiment",
    "level",
    "preconditioner",
    "lambda_over_abar",
    "alpha_ratio",
    "kappa",
    "kappa_method",
    "iterations",
    "dofs",
    "wall_ms",
)


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    dim: int = 2
    levels: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    alpha: tuple[float, float] = (1.5, 2.0)
    beta: tuple[float, float] = (1.0, 1.0)
    lambda_factor: float = 4.0
    shift: float = 2.0**-20
    half_side: float = 0.2
    corner_radius: float = 0.05
    center_base: float = 0.5
    preconditioners: list[str] = field(
        default_factory=lambda: ["exact_block", "mixed_block", "jacobi", "identity"]
    )
    rel_tol: float = 1e-6
    max_iter: int = 3000
    residual: str = "preconditioned"
    smoother: str = "both"
    kappa_method: str = "auto"
    dense_max_dofs: int = 1000
    lanczos_tol: float = 1e-12
    lanczos_max_iter: int = 500
    h_rule: str = "grid"
    table_level: int = 2
    lambda_factors: list[float] = field(default_factory=lambda: [4.0, 40.0, 400.0, 4000.0])
    alpha_ratios: list[float] = field(default_factory=lambda: [0.75, 7.5, 75.0, 750.0])
    max_level: int = 4
    record_timing: bool = True
    out: str = ""

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.shift < 0:
            raise ValueError("shift must be non-negative")
        if self.kappa_method not in ("auto", "dense", "lanczos", "none"):
            raise ValueError(f"unknown kappa_method {self.kappa_method!r}")
        if self.smoother not in ("jacobi", "sgs", "both"):
            raise ValueError(f"unknown smoother {self.smoother!r}")
        bad = [lv for lv in self.levels if lv < 0 or lv > self.max_level]
        if bad:
            raise ValueError(f"levels {bad} outside the supported range 0..{self.max_level}")

    @classmethod
    def reference_3d(cls, **kw) -> "ExperimentConfig":
        base = dict(
            dim=3,
            levels=[2, 3, 4],
            alpha=(1.0, 3.0),
            lambda_factor=5.0,
            preconditioners=["mg_block"],
        )
        base.update(kw)
        return cls(**base)


# ---------------------------------------------------------------- config I/O


def _convert(tp, text: str):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin in (list, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        vals = [_convert(args[0], t) for t in items]
        return tuple(vals) if origin is tuple else vals
    if tp is bool:
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    return tp(text)


def _format(value) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    return "".join(f"{f.name} = {_format(getattr(config, f.name))}\n" for f in dataclasses.fields(config))


def parse_config(text: str, base: ExperimentConfig | None = None, **overrides) -> ExperimentConfig:
    hints = typing.get_type_hints(ExperimentConfig)
    values = dataclasses.asdict(base) if base is not None else {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key = value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in hints:
            raise ValueError(f"line {n}: unknown key {key!r}")
        values[key] = _convert(hints[key], val)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), **overrides)


# ---------------------------------------------------------------- table cells


@dataclass
class Row:
    experiment: str
    level: int
    preconditioner: str
    lambda_over_abar: float
    alpha_ratio: float
    kappa: float | None
    kappa_method: str
    iterations: int | None
    converged: bool
    dofs: int
    wall_ms: float

    def csv_fields(self, max_iter: int) -> list[str]:
        its = str(self.iterations) if self.converged else f">{max_iter}"
        kappa = "" if self.kappa is None else f"{self.kappa:.6g}"
        return [
            self.experiment,
            str(self.level),
            self.preconditioner,
            f"{self.lambda_over_abar:g}",
            f"{self.alpha_ratio:g}",
            kappa,
            self.kappa_method,
            its,
            str(self.dofs),
            f"{self.wall_ms:.0f}",
        ]


def make_problem(config: ExperimentConfig, level: int, alpha=None, lambda_factor=None) -> Problem:
    alpha = tuple(config.alpha if alpha is None else alpha)
    lf = config.lambda_factor if lambda_factor is None else lambda_factor
    coeffs = ProblemCoefficients.with_lambda_factor(
        alpha, lf, beta=tuple(config.beta), h_rule=config.h_rule
    )
    # the transformed problem is what is preconditioned
    coeffs = coeffs.scaled_by_beta()
    n = level_subdivisions(config.dim, level)
    return build_problem(
        config.dim,
        n,
        coeffs,
        shift=config.center_base - 0.5 + config.shift,
        half_side=config.half_side,
        corner_radius=config.corner_radius,
    )


def condition_number(problem: Problem, precond, config: ExperimentConfig):
    """(kappa, method) of the preconditioned matrix, following ``config.kappa_method``."""
    method = config.kappa_method
    if method == "none":
        return None, "none"
    if method == "auto":
        dense_ok = precond.has_matrix and problem.n_dofs <= config.dense_max_dofs
        method = "dense" if dense_ok else "lanczos"
    if method == "dense":
        return exact_condition_dense(problem.A, precond.matrix()), "dense"
    k = saturated_lanczos_condition(
        problem.A, precond, tol=config.lanczos_tol, max_iter=config.lanczos_max_iter
    )
    return k, "lanczos"


def run_cell(
    experiment: str,
    problem: Problem,
    variant: str,
    config: ExperimentConfig,
    level: int,
    lambda_factor: float,
    alpha_ratio: float,
    smoother: str = "jacobi",
    kappa=True,
) -> Row:
    t0 = time.perf_counter()
    label = LABELS[variant] + ("(SGS)" if smoother == "sgs" else "")
    try:
        precond = problem.preconditioner(variant, smoother)
        rep = pcg(problem.A, problem.b, precond, config.rel_tol, config.max_iter, config.residual)
        if kappa == "solve":
            k, km = estimate_condition_lanczos(rep), "lanczos"
        elif kappa:
            k, km = condition_number(problem, precond, config)
        else:
            k, km = None, "none"
    except (IndefiniteError, ValueError, np.linalg.LinAlgError) as exc:
        raise ExperimentError(f"{experiment} level L{level} {label}: {exc}") from exc
    wall = (time.perf_counter() - t0) * 1e3 if config.record_timing else 0.0
    log.info("%s L%d %s: kappa=%s its=%d", experiment, level, label, k, rep.iterations)
    return Row(
        experiment,
        level,
        label,
        lambda_factor,
        alpha_ratio,
        k,
        km,
        rep.iterations,
        rep.converged,
        problem.n_dofs,
        wall,
    )


def _ratio(alpha) -> float:
    return alpha[0] / alpha[1]


def run_table1(config: ExperimentConfig) -> list[Row]:
    """Condition numbers and CG iterations per level and preconditioner."""
    if config.dim != 2:
        raise ValueError("table1 is a 2D experiment")
    rows = []
    for level in config.levels:
        p = make_problem(config, level)
        for v in config.preconditioners:
            rows.append(
                run_cell(
                    "table1", p, v, config, level, config.lambda_factor, _ratio(config.alpha)
                )
            )
    return rows


def _sweep_variants(config: ExperimentConfig) -> list[str]:
    # the unpreconditioned baseline only belongs to the level table
    return [v for v in config.preconditioners if v != "identity"]


def run_table2_lambda_sweep(config: ExperimentConfig) -> list[Row]:
    if config.dim != 2:
        raise ValueError("table2 is a 2D experiment")
    rows = []
    level = config.table_level
    for lf in config.lambda_factors:
        p = make_problem(config, level, lambda_factor=lf)
        for v in _sweep_variants(config):
            rows.append(run_cell("table2", p, v, config, level, lf, _ratio(config.alpha)))
    return rows


def run_table3_alpha_sweep(config: ExperimentConfig) -> list[Row]:
    """alpha_2 stays at ``config.alpha[1]``; alpha_1 = ratio * alpha_2."""
    if config.dim != 2:
        raise ValueError("table3 is a 2D experiment")
    rows = []
    level = config.table_level
    a2 = config.alpha[1]
    for ratio in config.alpha_ratios:
        p = make_problem(config, level, alpha=(ratio * a2, a2))
        for v in _sweep_variants(config):
            rows.append(run_cell("table3", p, v, config, level, config.lambda_factor, ratio))
    return rows


def run_table4_3d(config: ExperimentConfig) -> list[Row]:
    """Multigrid-preconditioned CG iterations in 3D; kappa from the solve's own Lanczos data."""
    if config.dim != 3:
        raise ValueError("table4 is a 3D experiment")
    smoothers = ["jacobi", "sgs"] if config.smoother == "both" else [config.smoother]
    rows = []
    for level in config.levels:
        p = make_problem(config, level)
        for s in smoothers:
            rows.append(
                run_cell(
                    "table4",
                    p,
                    "mg_block",
                    config,
                    level,
                    config.lambda_factor,
                    _ratio(config.alpha),
                    smoother=s,
                    kappa="solve",
                )
            )
    return rows


TABLES = {
    "table1": run_table1,
    "table2": run_table2_lambda_sweep,
    "table3": run_table3_alpha_sweep,
    "table4": run_table4_3d,
}


# ---------------------------------------------------------------- output


def write_csv(rows: list[Row], fh, max_iter: int = 3000) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_fields(max_iter))


def csv_text(rows: list[Row], max_iter: int = 3000) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, max_iter)
    return buf.getvalue()


def summary(rows: list[Row], max_iter: int = 3000) -> str:
    """Compact grid: one line per (experiment, preconditioner), 'kappa (its)' per column."""
    out = []
    for exp in dict.fromkeys(r.experiment for r in rows):
        sub = [r for r in rows if r.experiment == exp]
        if exp == "table2":
            key, head = (lambda r: r.lambda_over_abar), "lambda/abar"
        elif exp == "table3":
            key, head = (lambda r: r.alpha_ratio), "a1/a2"
        else:
            key, head = (lambda r: r.level), "level"
        cols = list(dict.fromkeys(key(r) for r in sub))
        out.append(f"{exp}  ({head}: {', '.join(f'{c:g}' if isinstance(c, float) else f'L{c}' for c in cols)})")
        for pc in dict.fromkeys(r.preconditioner for r in sub):
            cells = []
            for c in cols:
                r = next((r for r in sub if r.preconditioner == pc and key(r) == c), None)
                if r is None:
                    cells.append("-")
                    continue
                its = str(r.iterations) if r.converged else f">{max_iter}"
                k = "" if r.kappa is None else f"{r.kappa:.3g} "
                cells.append(f"{k}({its})")
            out.append(f"  {pc:<10}" + "".join(f"{c:>18}" for c in cells))
    return "\n".join(out)
