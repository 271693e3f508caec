"""Assembly of the Nitsche-XFEM stiffness matrix, load vector and norm matrix.

The bilinear form is

    a(u, v) = sum_i alpha_i (grad u, grad v)_{Omega_i}
              - ({alpha du/dn}, [v])_Gamma - ({alpha dv/dn}, [u])_Gamma
              + lambda h^{-1} ([u], [v])_Gamma

with [w] = w|_1 - w|_2, n pointing from subdomain 1 into subdomain 2 and the
average {w} = kappa_1 w_1 + kappa_2 w_2, kappa_i = |T_i| / |T|.  Matrices are
returned as scipy CSR matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .levelset import CutData, CutElement, barycentric, facet_measure, hat_gradients
from .mesh import SimplicialMesh
from .xfem import DofMap

_GAUSS2 = np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)])


@dataclass(frozen=True)
class ProblemCoefficients:
    alpha: tuple[float, float] = (1.5, 2.0)
    beta: tuple[float, float] = (1.0, 1.0)
    lam: float = 7.0
    f: tuple[float, float] = (1.0, 0.0)
    h_rule: str = "grid"

    def __post_init__(self):
        if min(self.alpha) <= 0:
            raise ValueError("alpha must be positive")
        if min(self.beta) <= 0:
            raise ValueError("beta must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.h_rule not in PENALTY_LENGTHS:
            raise ValueError(f"h_rule must be one of {sorted(PENALTY_LENGTHS)}")

    @property
    def alpha_bar(self) -> float:
        return 0.5 * (self.alpha[0] + self.alpha[1])

    @classmethod
    def with_lambda_factor(cls, alpha=(1.5, 2.0), lambda_factor=4.0, **kw):
        """Penalty set relative to the mean diffusivity: lambda = factor * mean(alpha)."""
        alpha = tuple(float(a) for a in alpha)
        return cls(alpha=alpha, lam=lambda_factor * 0.5 * (alpha[0] + alpha[1]), **kw)

    def scaled_by_beta(self) -> "ProblemCoefficients":
        """Coefficients of the transformed problem: alpha / beta and unit beta."""
        a = tuple(a / b for a, b in zip(self.alpha, self.beta))
        return replace(self, alpha=a, beta=(1.0, 1.0))


def facet_quadrature(facet: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights exact for quadratics on a segment or triangle."""
    m = facet_measure(facet)
    if facet.shape[0] == 2:
        pts = facet[0] + _GAUSS2[:, None] * (facet[1] - facet[0])
        return pts, np.full(2, 0.5 * m)
    mids = 0.5 * (facet + np.roll(facet, -1, axis=0))
    return mids, np.full(3, m / 3.0)


def element_diameter(x: np.ndarray) -> float:
    d = x[:, None, :] - x[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def element_grid_length(x: np.ndarray) -> float:
    """(d! |T|)^(1/d): the axis spacing 1/n for the simplices of a uniform grid."""
    d = x.shape[1]
    return float(abs(np.linalg.det(x[1:] - x[0])) ** (1.0 / d))


# mesh size entering the penalty lambda / h_T
PENALTY_LENGTHS = {"grid": element_grid_length, "diameter": element_diameter}


def cut_local_dofs(mesh: SimplicialMesh, dofmap: DofMap, element: int) -> np.ndarray:
    """Local dof list of a cut element: d+1 standard dofs then d+1 enrichments."""
    verts = mesh.simplices[element]
    return np.concatenate([dofmap.std_dof[verts], dofmap.enr_dof[verts]])


def side_maps(dofmap: DofMap, verts: np.ndarray) -> dict[int, np.ndarray]:
    """For each side i, the 0/1 matrix H_i with psi_l|T_i = sum_k H_i[l, k] hat_k."""
    n = len(verts)
    side = dofmap.vertex_side[verts]
    out = {}
    for i in (1, 2):
        H = np.zeros((2 * n, n))
        H[np.arange(n), np.arange(n)] = 1.0
        opposite = np.flatnonzero(side != i)
        H[n + opposite, opposite] = 1.0
        out[i] = H
    return out


def cut_element_matrix(
    ce: CutElement,
    H: dict[int, np.ndarray],
    vol_weight,
    flux_weight,
    jump_weight,
    lam: float,
    h_T: float,
) -> np.ndarray:
    """Local matrix of the form on one cut element in the local dof basis.

    ``vol_weight`` scales the gradient terms per side, ``flux_weight`` the
    normal fluxes inside the average, ``jump_weight`` the traces inside the
    jump ``[w] = j_1 w_1 - j_2 w_2``.
    """
    G = hat_gradients(ce.coords)
    K = np.zeros((H[1].shape[0],) * 2)
    flux = np.zeros(H[1].shape[0])
    kappa = {1: ce.kappa1, 2: ce.kappa2}
    for i in (1, 2):
        Gi = H[i] @ G
        K += vol_weight[i - 1] * ce.side_measure(i) * (Gi @ Gi.T)
        flux += kappa[i] * flux_weight[i - 1] * (Gi @ ce.normal)
    jint = np.zeros_like(flux)
    pen = np.zeros_like(K)
    for facet in ce.facets:
        pts, w = facet_quadrature(facet)
        lam_q = barycentric(ce.coords, pts)
        J = jump_weight[0] * (H[1] @ lam_q.T) - jump_weight[1] * (H[2] @ lam_q.T)
        jint += J @ w
        pen += (J * w) @ J.T
    K -= np.outer(flux, jint) + np.outer(jint, flux)
    K += (lam / h_T) * pen
    return K


def _uncut_gradients(mesh: SimplicialMesh, elems: np.ndarray):
    X = mesh.vertices[mesh.simplices[elems]]
    E = X[:, 1:, :] - X[:, :1, :]
    vol = np.abs(np.linalg.det(E)) / math.factorial(mesh.dim)
    g = np.transpose(np.linalg.inv(E), (0, 2, 1))
    G = np.concatenate([-g.sum(axis=1, keepdims=True), g], axis=1)
    return G, vol


def _assemble(
    mesh, cut, dofmap, vol_weight, flux_weight, jump_weight, lam, h_rule="grid"
) -> sp.csr_matrix:
    h_of = PENALTY_LENGTHS[h_rule]
    rows, cols, vals = [], [], []
    cls = np.asarray(cut.element_class)
    for s in (1, 2):
        elems = np.flatnonzero(cls == s)
        if len(elems) == 0:
            continue
        G, vol = _uncut_gradients(mesh, elems)
        K = vol_weight[s - 1] * vol[:, None, None] * np.einsum("ekd,eld->ekl", G, G)
        dofs = dofmap.std_dof[mesh.simplices[elems]]
        r = np.broadcast_to(dofs[:, :, None], K.shape)
        c = np.broadcast_to(dofs[:, None, :], K.shape)
        keep = (r >= 0) & (c >= 0)
        rows.append(r[keep])
        cols.append(c[keep])
        vals.append(K[keep])
    for ce in cut.cut_elements:
        verts = mesh.simplices[ce.element]
        K = cut_element_matrix(
            ce,
            side_maps(dofmap, verts),
            vol_weight,
            flux_weight,
            jump_weight,
            lam,
            h_of(ce.coords),
        )
        dofs = cut_local_dofs(mesh, dofmap, ce.element)
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(K.ravel())
    n = dofmap.n_dofs
    if not rows:
        return sp.csr_matrix((n, n))
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    A.sum_duplicates()
    return A


def assemble_stiffness(mesh, cut, dofmap, coeffs: ProblemCoefficients) -> sp.csr_matrix:
    """Stiffness matrix of the transformed (unit-beta) form with diffusivities ``coeffs.alpha``."""
    a = coeffs.alpha
    return _assemble(mesh, cut, dofmap, a, a, (1.0, 1.0), coeffs.lam, coeffs.h_rule)


def assemble_stiffness_beta(mesh, cut, dofmap, coeffs: ProblemCoefficients) -> sp.csr_matrix:
    """Stiffness matrix of the Henry-coefficient form with test functions not rescaled."""
    a, b = coeffs.alpha, coeffs.beta
    vol = (a[0] * b[0], a[1] * b[1])
    return _assemble(mesh, cut, dofmap, vol, a, b, coeffs.lam, coeffs.h_rule)


def assemble_norm_matrix(mesh, cut, dofmap, lam: float, h_rule: str = "grid") -> sp.csr_matrix:
    """Matrix N with u^T N u = |u|_1^2 (broken) + lam h^{-1} ||[u]||^2_Gamma."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return _assemble(mesh, cut, dofmap, (1.0, 1.0), (0.0, 0.0), (1.0, 1.0), lam, h_rule)


def assemble_rhs(mesh, cut, dofmap, coeffs: ProblemCoefficients) -> np.ndarray:
    f = coeffs.f
    b = np.zeros(dofmap.n_dofs)
    cls = np.asarray(cut.element_class)
    d1 = mesh.dim + 1
    for s in (1, 2):
        if f[s - 1] == 0.0:
            continue
        elems = np.flatnonzero(cls == s)
        if len(elems) == 0:
            continue
        _, vol = _uncut_gradients(mesh, elems)
        dofs = dofmap.std_dof[mesh.simplices[elems]]
        contrib = np.broadcast_to((f[s - 1] * vol / d1)[:, None], dofs.shape)
        keep = dofs >= 0
        np.add.at(b, dofs[keep], contrib[keep])
    for ce in cut.cut_elements:
        verts = mesh.simplices[ce.element]
        H = side_maps(dofmap, verts)
        dofs = cut_local_dofs(mesh, dofmap, ce.element)
        local = np.zeros(len(dofs))
        for i in (1, 2):
            if f[i - 1] == 0.0:
                continue
            for sub in ce.sub_simplices[i]:
                vol = abs(np.linalg.det(sub[1:] - sub[0])) / math.factorial(mesh.dim)
                lam_c = barycentric(ce.coords, sub.mean(axis=0))[0]
                local += f[i - 1] * vol * (H[i] @ lam_c)
        np.add.at(b, dofs, local)
    return b


@dataclass(frozen=True)
class Blocks:
    A0: sp.csr_matrix
    Ax: sp.csr_matrix
    A1: sp.csr_matrix
    A2: sp.csr_matrix
    DA: np.ndarray
    Dx: np.ndarray

    @property
    def D0(self) -> np.ndarray:
        return self.DA[: self.A0.shape[0]]


def extract_blocks(A: sp.spmatrix, dofmap: DofMap) -> Blocks:
    A = sp.csr_matrix(A)

    def sub(s: slice) -> sp.csr_matrix:
        return A[s, s].tocsr()

    Ax = sub(dofmap.wx)
    return Blocks(
        A0=sub(dofmap.w0),
        Ax=Ax,
        A1=sub(dofmap.w1),
        A2=sub(dofmap.w2),
        DA=A.diagonal().copy(),
        Dx=Ax.diagonal().copy(),
    )


def symmetry_error(A: sp.spmatrix) -> float:
    """max |A_ij - A_ji| relative to max |A|."""
    A = sp.csr_matrix(A)
    diff = abs(A - A.T)
    scale = abs(A).max()
    if scale == 0:
        return 0.0
    return float(diff.max() / scale)


def write_coordinate(A: sp.spmatrix, path) -> None:
    """Header ``rows cols nnz`` then one 1-based ``row col value`` triplet per line."""
    C = sp.coo_matrix(A)
    order = np.lexsort((C.col, C.row))
    with open(path, "w") as fh:
        fh.write(f"{C.shape[0]} {C.shape[1]} {C.nnz}\n")
        for i, j, v in zip(C.row[order], C.col[order], C.data[order]):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def read_coordinate(path) -> sp.csr_matrix:
    with open(path) as fh:
        m, n, nnz = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 3))
    return sp.coo_matrix(
        (data[:, 2], (data[:, 0].astype(int) - 1, data[:, 1].astype(int) - 1)), shape=(m, n)
    ).tocsr()

