"""Additive subspace (block-diagonal) preconditioners for the XFEM system.

Each variant applies independent corrections on the standard block W0 and on
the enrichment block Wx = W1 + W2:

    identity     z = r
    jacobi       z = r / diag(A)
    exact_block  B_A = blockdiag(A0, Ax), both blocks solved exactly
    mixed_block  B_D = blockdiag(A0, Dx)
    mg_block     B_C = blockdiag(C0, Dx) with C0 one multigrid V-cycle
                 (the xfem block may use symmetric Gauss-Seidel instead of Dx)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import Blocks
from .multigrid import MGHierarchy, v_cycle
from .xfem import DofMap

VARIANTS = ("identity", "jacobi", "exact_block", "mixed_block", "mg_block")
SMOOTHERS = ("jacobi", "sgs")

# table labels
LABELS = {
    "identity": "I",
    "jacobi": "D_A",
    "exact_block": "B_A",
    "mixed_block": "B_D",
    "mg_block": "B_C",
}


class ScaledFactor:
    """Exact solver for an SPD matrix via LU of its unit-diagonal scaling."""

    def __init__(self, A):
        A = sp.csc_matrix(A)
        d = A.diagonal()
        if np.any(d <= 0):
            raise ValueError("exact block solver needs a positive diagonal")
        self.s = 1.0 / np.sqrt(d)
        S = sp.diags(self.s)
        self.n = A.shape[0]
        if self.n:
            self.lu = spla.splu(
                sp.csc_matrix(S @ A @ S), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0
            )

    def solve(self, r):
        if self.n == 0:
            return np.zeros(0)
        return self.s * self.lu.solve(self.s * r)


def sgs_factors(Ax):
    Ax = sp.csr_matrix(Ax)
    d = Ax.diagonal()
    if np.any(d == 0):
        raise ValueError("symmetric Gauss-Seidel needs a non-zero diagonal")
    return sp.tril(Ax, format="csr"), d


def sgs_apply(Ax, r, factors=None):
    """Inverse of (L+D) D^{-1} (L+D)^T applied to r, where Ax = L + D + L^T."""
    LD, d = factors if factors is not None else sgs_factors(Ax)
    if LD.shape[0] == 0:
        return np.zeros(0)
    y = spla.spsolve_triangular(LD, r, lower=True)
    return spla.spsolve_triangular(LD.T.tocsr(), d * y, lower=False)


@dataclass
class Preconditioner:
    variant: str
    n: int
    n_std: int
    smoother: str = "jacobi"
    inv_diag: np.ndarray | None = field(default=None, repr=False)
    solver0: object = field(default=None, repr=False)
    solverx: object = field(default=None, repr=False)
    hierarchy: MGHierarchy | None = field(default=None, repr=False)
    sgs: tuple | None = field(default=None, repr=False)
    _matrix: object = field(default=None, repr=False)

    @property
    def label(self) -> str:
        return LABELS[self.variant]

    @property
    def has_matrix(self) -> bool:
        return self._matrix is not None

    def matrix(self) -> sp.csr_matrix:
        """The SPD matrix B whose inverse this preconditioner applies."""
        if self._matrix is None:
            raise ValueError(f"{self.variant} has no explicit matrix; use a Lanczos estimate")
        return self._matrix

    def _apply_0(self, r0):
        if self.variant == "mg_block":
            return v_cycle(self.hierarchy, r0)
        return self.solver0.solve(r0)

    def _apply_x(self, rx):
        if self.variant == "exact_block":
            return self.solverx.solve(rx)
        if self.smoother == "sgs":
            return sgs_apply(None, rx, self.sgs)
        return self.inv_diag[self.n_std :] * rx

    def apply(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if r.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}")
        if self.variant == "identity":
            return r.copy()
        if self.variant == "jacobi":
            return self.inv_diag * r
        z = np.empty_like(r)
        z[: self.n_std] = self._apply_0(r[: self.n_std])
        z[self.n_std :] = self._apply_x(r[self.n_std :])
        return z

    __call__ = apply

    def as_linear_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator((self.n, self.n), matvec=self.apply, dtype=float)


def build_preconditioner(
    variant: str,
    A,
    blocks: Blocks,
    dofmap: DofMap,
    hierarchy: MGHierarchy | None = None,
    smoother: str = "jacobi",
) -> Preconditioner:
    if variant not in VARIANTS:
        raise ValueError(f"unknown preconditioner {variant!r}; choose from {VARIANTS}")
    if smoother not in SMOOTHERS:
        raise ValueError(f"unknown xfem smoother {smoother!r}")
    n = dofmap.n_dofs
    if variant != "identity" and np.any(blocks.DA <= 0):
        bad = int(np.flatnonzero(blocks.DA <= 0)[0])
        raise ValueError(
            f"diagonal entry {bad} is {blocks.DA[bad]:.3e} <= 0: matrix not SPD "
            "(penalty too small?)"
        )
    p = Preconditioner(variant, n, dofmap.n_std, smoother)
    if variant == "identity":
        p._matrix = sp.identity(n, format="csr")
        return p
    p.inv_diag = 1.0 / blocks.DA
    if variant == "jacobi":
        p._matrix = sp.diags(blocks.DA, format="csr")
        return p
    if variant == "mg_block":
        if hierarchy is None:
            raise ValueError("mg_block needs a multigrid hierarchy")
        p.hierarchy = hierarchy
    else:
        p.solver0 = ScaledFactor(blocks.A0)
    if variant == "exact_block":
        p.solverx = ScaledFactor(blocks.Ax)
        p._matrix = sp.block_diag([blocks.A0, blocks.Ax], format="csr")
    elif smoother == "sgs":
        p.sgs = sgs_factors(blocks.Ax)
    elif variant == "mixed_block":
        p._matrix = sp.block_diag([blocks.A0, sp.diags(blocks.Dx)], format="csr")
    if variant == "mixed_block" and smoother == "sgs":
        LD, d = p.sgs
        Bx = LD @ sp.diags(1.0 / d) @ LD.T
        p._matrix = sp.block_diag([blocks.A0, Bx], format="csr")
    return p
