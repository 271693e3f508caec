"""Nitsche-XFEM discretization of a two-domain elliptic interface problem with
additive subspace preconditioners (exact block, mixed block, Jacobi, multigrid)."""

from .assembly import ProblemCoefficients, assemble_norm_matrix, assemble_rhs, assemble_stiffness
from .experiments import ExperimentConfig, parse_config, serialize_config
from .krylov import exact_condition_dense, pcg, saturated_lanczos_condition
from .mesh import build_uniform_mesh, level_subdivisions
from .preconditioners import build_preconditioner
from .problem import Problem, build_problem

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "Problem",
    "ProblemCoefficients",
    "assemble_norm_matrix",
    "assemble_rhs",
    "assemble_stiffness",
    "build_preconditioner",
    "build_problem",
    "build_uniform_mesh",
    "exact_condition_dense",
    "level_subdivisions",
    "parse_config",
    "pcg",
    "saturated_lanczos_condition",
    "serialize_config",
]
