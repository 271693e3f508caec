"""One-call setup of the interface test problem on a uniform mesh."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .assembly import (
    Blocks,
    ProblemCoefficients,
    assemble_rhs,
    assemble_stiffness,
    extract_blocks,
)
from .levelset import DEFAULT_SNAP_TOL, CutData, experiment_levelset, vertex_levelset, compute_cut
from .mesh import SimplicialMesh, build_uniform_mesh, mesh_hierarchy
from .multigrid import MGHierarchy, build_hierarchy
from .preconditioners import Preconditioner, build_preconditioner
from .xfem import DofMap, build_dofmap


@dataclass
class Problem:
    mesh: SimplicialMesh
    cut: CutData
    dofmap: DofMap
    coeffs: ProblemCoefficients
    A: sp.csr_matrix = field(repr=False)
    b: np.ndarray = field(repr=False)
    blocks: Blocks = field(repr=False)
    _hierarchy: MGHierarchy | None = field(default=None, repr=False)

    @property
    def n_dofs(self) -> int:
        return self.dofmap.n_dofs

    def hierarchy(self, n_coarse: int = 2, omega: float = 0.8) -> MGHierarchy:
        if self._hierarchy is None:
            n_levels = int(round(np.log2(self.mesh.n_subdiv / n_coarse))) + 1
            meshes = mesh_hierarchy(self.mesh.dim, n_coarse, n_levels)
            if meshes[-1].n_subdiv != self.mesh.n_subdiv:
                raise ValueError("mesh size is not n_coarse times a power of two")
            meshes[-1] = self.mesh
            self._hierarchy = build_hierarchy(meshes, self.blocks.A0, omega)
        return self._hierarchy

    def preconditioner(self, variant: str, smoother: str = "jacobi") -> Preconditioner:
        h = self.hierarchy() if variant == "mg_block" else None
        return build_preconditioner(variant, self.A, self.blocks, self.dofmap, h, smoother)


def build_problem(
    dim: int,
    n_subdiv: int,
    coeffs: ProblemCoefficients,
    shift: float = 2.0**-20,
    half_side: float = 0.2,
    corner_radius: float = 0.05,
    snap_tol: float = DEFAULT_SNAP_TOL,
) -> Problem:
    mesh = build_uniform_mesh(dim, n_subdiv)
    ls = experiment_levelset(dim, shift, half_side, corner_radius)
    cut = compute_cut(mesh, vertex_levelset(mesh, ls, snap_tol))
    dofmap = build_dofmap(mesh, cut)
    A = assemble_stiffness(mesh, cut, dofmap, coeffs)
    b = assemble_rhs(mesh, cut, dofmap, coeffs)
    return Problem(mesh, cut, dofmap, coeffs, A, b, extract_blocks(A, dofmap))
