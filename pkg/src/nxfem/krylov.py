"""Preconditioned CG with Lanczos condition estimates, plus dense reference condition numbers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp


class IndefiniteError(ArithmeticError):
    """CG met a non-positive curvature or preconditioned residual product."""


@dataclass
class SolveReport:
    x: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    residual_norms: list = field(repr=False)
    alphas: list = field(repr=False)
    betas: list = field(repr=False)
    kappa_est: float | None = None
    kappa_method: str | None = None

    @property
    def reduction(self) -> float:
        r = self.residual_norms
        return r[-1] / r[0] if r[0] > 0 else 0.0


def _as_apply(M):
    if M is None:
        return lambda r: r.copy()
    if hasattr(M, "apply"):
        return M.apply
    if callable(M):
        return M
    raise TypeError("preconditioner must be None, callable or have an apply method")


def pcg(
    A,
    b,
    M=None,
    rel_tol: float = 1e-6,
    max_iter: int = 1000,
    residual: str = "euclidean",
) -> SolveReport:
    """Solve ``A x = b`` from a zero initial guess.

    Stops once the residual norm has dropped by ``rel_tol``; ``residual``
    chooses the Euclidean norm of r or the preconditioned norm sqrt(r.z).
    """
    if residual not in ("euclidean", "preconditioned"):
        raise ValueError("residual must be 'euclidean' or 'preconditioned'")
    apply_M = _as_apply(M)
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    r = b.copy()
    z = apply_M(r)
    rz = float(r @ z)

    def norm():
        return float(np.linalg.norm(r)) if residual == "euclidean" else float(np.sqrt(max(rz, 0.0)))

    norms = [norm()]
    alphas, betas = [], []
    if norms[0] == 0.0:
        return SolveReport(x, 0, True, norms, alphas, betas)
    if rz <= 0:
        raise IndefiniteError(f"preconditioner not positive: r.z = {rz:.3e} at start")
    target = rel_tol * norms[0]
    p = z.copy()
    converged = False
    k = 0
    while k < max_iter:
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0:
            raise IndefiniteError(f"p.Ap = {pAp:.3e} at iteration {k}; matrix not SPD")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        z = apply_M(r)
        rz_new = float(r @ z)
        alphas.append(alpha)
        k += 1
        if rz_new < 0:
            raise IndefiniteError(f"r.z = {rz_new:.3e} at iteration {k}; preconditioner not SPD")
        rz_old, rz = rz, rz_new
        norms.append(norm())
        if norms[-1] <= target:
            converged = True
            break
        beta = rz / rz_old
        betas.append(beta)
        p = z + beta * p
    return SolveReport(x, k, converged, norms, alphas, betas)


def lanczos_tridiagonal(alphas, betas) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the Lanczos matrix implied by CG scalars."""
    a = np.asarray(alphas, dtype=float)
    m = len(a)
    bt = np.asarray(betas[: m - 1], dtype=float)
    diag = 1.0 / a
    diag[1:] += bt / a[:-1]
    off = np.sqrt(bt) / a[:-1]
    return diag, off


def lanczos_extremes(report: SolveReport) -> tuple[float, float]:
    if len(report.alphas) < 2:
        raise ValueError("need at least 2 CG iterations for a Lanczos estimate")
    d, e = lanczos_tridiagonal(report.alphas, report.betas)
    theta = sla.eigvalsh_tridiagonal(d, e)
    return float(theta[0]), float(theta[-1])


def estimate_condition_lanczos(report: SolveReport) -> float:
    lo, hi = lanczos_extremes(report)
    report.kappa_est = hi / lo
    report.kappa_method = "lanczos"
    return report.kappa_est


def saturated_lanczos_condition(A, M=None, b=None, tol=1e-12, max_iter=500, seed=0) -> float:
    """Lanczos estimate from a CG run driven to ``tol``.

    A pseudo-random right-hand side (fixed seed) excites the whole spectrum.
    """
    n = A.shape[0]
    if b is None:
        b = np.random.default_rng(seed).standard_normal(n)
    rep = pcg(A, b, M, rel_tol=tol, max_iter=max_iter)
    return estimate_condition_lanczos(rep)


def _dense(B) -> np.ndarray:
    if hasattr(B, "matrix"):
        B = B.matrix()
    if sp.issparse(B):
        return B.toarray()
    return np.asarray(B, dtype=float)


def generalized_eigenvalues(A, B) -> np.ndarray:
    """Eigenvalues theta of A z = theta B z for SPD A, B (dense)."""
    Ad = _dense(A)
    Bd = _dense(B)
    # symmetric diagonal scaling keeps both Cholesky factors well conditioned
    s = 1.0 / np.sqrt(np.abs(np.diag(Ad)))
    Ad = Ad * s[:, None] * s[None, :]
    Bd = Bd * s[:, None] * s[None, :]
    return sla.eigh(Ad, Bd, eigvals_only=True)


def exact_condition_dense(A, B=None) -> float:
    """theta_max / theta_min of the pencil (A, B); ``B=None`` means the identity."""
    if B is None:
        ev = np.linalg.eigvalsh(_dense(A))
        return float(ev[-1] / ev[0])
    if hasattr(B, "matrix") and getattr(B, "has_matrix", True) is False:
        raise ValueError("preconditioner has no explicit matrix; use the Lanczos estimate")
    ev = generalized_eigenvalues(A, B)
    return float(ev[-1] / ev[0])
