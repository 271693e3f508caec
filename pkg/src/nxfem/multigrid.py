"""Geometric multigrid V-cycle for the continuous P1 block on nested uniform meshes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .mesh import SimplicialMesh


def prolongation(coarse: SimplicialMesh, fine: SimplicialMesh) -> sp.csr_matrix:
    """Nodal interpolation from interior coarse vertices to interior fine vertices.

    A fine vertex either coincides with a coarse vertex or is the midpoint of
    a coarse edge joining ``floor(g/2)`` and ``ceil(g/2)`` (grid indices).
    Boundary coarse vertices are dropped (homogeneous Dirichlet values).
    """
    if coarse.dim != fine.dim or fine.n_subdiv != 2 * coarse.n_subdiv:
        raise ValueError(
            f"meshes are not nested: n={coarse.n_subdiv} -> n={fine.n_subdiv} (dim "
            f"{coarse.dim} -> {fine.dim})"
        )
    nc = coarse.n_subdiv + 1
    stride = nc ** np.arange(coarse.dim)
    fine_int = fine.interior_vertices()
    g = fine.grid_index()[fine_int]
    lo = (g // 2) @ stride
    hi = ((g + 1) // 2) @ stride
    coarse_dof = np.full(coarse.n_vertices, -1, dtype=np.int64)
    coarse_int = coarse.interior_vertices()
    coarse_dof[coarse_int] = np.arange(len(coarse_int))
    rows = np.arange(len(fine_int))
    same = lo == hi
    r = np.concatenate([rows[same], rows[~same], rows[~same]])
    c = np.concatenate([lo[same], lo[~same], hi[~same]])
    v = np.concatenate([np.ones(same.sum()), np.full(2 * (~same).sum(), 0.5)])
    c = coarse_dof[c]
    keep = c >= 0
    return sp.csr_matrix(
        (v[keep], (r[keep], c[keep])), shape=(len(fine_int), len(coarse_int))
    )


@dataclass
class MGHierarchy:
    """Level 0 is the coarsest; ``prolongations[k]`` maps level k to level k+1."""

    matrices: list = field(repr=False)
    prolongations: list = field(repr=False)
    omega: float = 0.8
    inv_diag: list = field(default_factory=list, repr=False)
    coarse_factor: tuple | None = field(default=None, repr=False)

    @property
    def n_levels(self) -> int:
        return len(self.matrices)


def build_hierarchy(meshes, A0_fine, omega: float = 0.8) -> MGHierarchy:
    """Galerkin hierarchy ``A_{k-1} = P_k^T A_k P_k`` on ``meshes`` (coarse to fine)."""
    A0_fine = sp.csr_matrix(A0_fine)
    Ps = [prolongation(c, f) for c, f in zip(meshes[:-1], meshes[1:])]
    if Ps and Ps[-1].shape[0] != A0_fine.shape[0]:
        raise ValueError("finest mesh does not match the size of A0")
    if not Ps and meshes[0].interior_vertices().size != A0_fine.shape[0]:
        raise ValueError("mesh does not match the size of A0")
    mats = [A0_fine]
    for P in reversed(Ps):
        mats.append((P.T @ mats[-1] @ P).tocsr())
    mats.reverse()
    inv_diag = []
    for A in mats:
        d = A.diagonal()
        if np.any(d <= 0):
            raise ValueError("non-positive diagonal in multigrid hierarchy")
        inv_diag.append(1.0 / d)
    coarse = sla.cho_factor(mats[0].toarray())
    return MGHierarchy(mats, Ps, omega, inv_diag, coarse)


def v_cycle(h: MGHierarchy, r: np.ndarray, level: int | None = None) -> np.ndarray:
    """One V-cycle from a zero guess: damped Jacobi pre/post smoothing, exact coarsest solve."""
    if level is None:
        level = h.n_levels - 1
    if level == 0:
        return sla.cho_solve(h.coarse_factor, r)
    A = h.matrices[level]
    D = h.inv_diag[level]
    P = h.prolongations[level - 1]
    x = h.omega * D * r
    x += P @ v_cycle(h, P.T @ (r - A @ x), level - 1)
    x += h.omega * D * (r - A @ x)
    return x
