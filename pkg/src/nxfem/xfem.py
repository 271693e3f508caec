"""Degrees of freedom of the XFEM space: P1 hats plus Heaviside-enriched hats.

Dofs are ordered in three contiguous blocks: standard hats of the interior
vertices (W0), enrichments supported in subdomain 1 (W1, owned by vertices
lying in subdomain 2), and enrichments supported in subdomain 2 (W2, owned by
vertices lying in subdomain 1).  Boundary vertices carry no dofs.

On the part T_i of a cut element the enrichment of vertex k is either zero
(k lies on side i) or coincides with the hat of k (k lies on the other side).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .levelset import CUT, CutData
from .mesh import SimplicialMesh

STANDARD, ENRICH_1, ENRICH_2 = 0, 1, 2


@dataclass(frozen=True)
class DofMap:
    n_std: int
    j_gamma_1: np.ndarray = field(repr=False)
    j_gamma_2: np.ndarray = field(repr=False)
    std_dof: np.ndarray = field(repr=False)
    enr_dof: np.ndarray = field(repr=False)
    dof_vertex: np.ndarray = field(repr=False)
    vertex_side: np.ndarray = field(repr=False)

    @property
    def n_enr1(self) -> int:
        return len(self.j_gamma_1)

    @property
    def n_enr2(self) -> int:
        return len(self.j_gamma_2)

    @property
    def n_enr(self) -> int:
        return self.n_enr1 + self.n_enr2

    @property
    def n_dofs(self) -> int:
        return self.n_std + self.n_enr

    @property
    def j_gamma(self) -> np.ndarray:
        return np.sort(np.concatenate([self.j_gamma_1, self.j_gamma_2]))

    @property
    def w0(self) -> slice:
        return slice(0, self.n_std)

    @property
    def w1(self) -> slice:
        return slice(self.n_std, self.n_std + self.n_enr1)

    @property
    def w2(self) -> slice:
        return slice(self.n_std + self.n_enr1, self.n_dofs)

    @property
    def wx(self) -> slice:
        return slice(self.n_std, self.n_dofs)

    def dof_kind(self) -> np.ndarray:
        kind = np.full(self.n_dofs, STANDARD, dtype=np.int8)
        kind[self.w1] = ENRICH_1
        kind[self.w2] = ENRICH_2
        return kind

    def support_side(self, vertex: int) -> int:
        """Subdomain carrying the enrichment of ``vertex`` (opposite to the vertex)."""
        return 3 - int(self.vertex_side[vertex])


def build_dofmap(mesh: SimplicialMesh, cut: CutData) -> DofMap:
    interior = ~mesh.boundary_vertex
    std_dof = np.full(mesh.n_vertices, -1, dtype=np.int64)
    std_dof[interior] = np.arange(int(interior.sum()))
    n_std = int(interior.sum())

    cut_ids = cut.cut_element_ids()
    if len(cut_ids):
        cut_vertices = np.unique(mesh.simplices[cut_ids])
    else:
        cut_vertices = np.zeros(0, dtype=np.int64)
    on_boundary = cut_vertices[mesh.boundary_vertex[cut_vertices]]
    if len(on_boundary):
        raise ValueError(
            f"interface reaches boundary vertices {on_boundary[:5].tolist()}; "
            "enrichment of Dirichlet vertices is not supported"
        )
    side = np.asarray(cut.vertex_side)
    j1 = cut_vertices[side[cut_vertices] == 2]
    j2 = cut_vertices[side[cut_vertices] == 1]

    enr_dof = np.full(mesh.n_vertices, -1, dtype=np.int64)
    enr_dof[j1] = n_std + np.arange(len(j1))
    enr_dof[j2] = n_std + len(j1) + np.arange(len(j2))
    dof_vertex = np.concatenate([np.flatnonzero(interior), j1, j2])
    for a in (std_dof, enr_dof, dof_vertex, j1, j2):
        a.setflags(write=False)
    return DofMap(
        n_std=n_std,
        j_gamma_1=j1,
        j_gamma_2=j2,
        std_dof=std_dof,
        enr_dof=enr_dof,
        dof_vertex=dof_vertex,
        vertex_side=side,
    )


def local_active_basis(
    mesh: SimplicialMesh, cut: CutData, dofmap: DofMap, element: int, side: int | None = None
) -> list[tuple[int, int]]:
    """Pairs ``(dof, k)``: dofs whose restriction to the element (part) equals hat k.

    For uncut elements ``side`` may be omitted; if given it must match the
    element's subdomain.  Cut elements require ``side``.
    """
    verts = mesh.simplices[element]
    cls = int(cut.element_class[element])
    if cls != CUT:
        if side is not None and side != cls:
            raise ValueError(f"element {element} lies in subdomain {cls}, not {side}")
        return [(int(dofmap.std_dof[v]), k) for k, v in enumerate(verts) if dofmap.std_dof[v] >= 0]
    if side not in (1, 2):
        raise ValueError("cut elements need side 1 or 2")
    basis = [(int(dofmap.std_dof[v]), k) for k, v in enumerate(verts) if dofmap.std_dof[v] >= 0]
    basis += [
        (int(dofmap.enr_dof[v]), k)
        for k, v in enumerate(verts)
        if dofmap.vertex_side[v] != side and dofmap.enr_dof[v] >= 0
    ]
    return basis


def beta_transform(dofmap: DofMap, beta) -> sp.csr_matrix:
    """Matrix T whose row i holds the coefficients of psi_i / beta in the basis."""
    b1, b2 = (float(b) for b in beta)
    if b1 <= 0 or b2 <= 0:
        raise ValueError("beta must be positive")
    inv = np.array([0.0, 1.0 / b1, 1.0 / b2])
    rows, cols, vals = [], [], []
    vertices = dofmap.dof_vertex[: dofmap.n_std]
    s = dofmap.vertex_side[vertices]
    std = np.arange(dofmap.n_std)
    rows.append(std)
    cols.append(std)
    vals.append(inv[s])
    enr = dofmap.enr_dof[vertices]
    has = enr >= 0
    rows.append(std[has])
    cols.append(enr[has])
    vals.append(inv[3 - s[has]] - inv[s[has]])
    e = np.arange(dofmap.n_std, dofmap.n_dofs)
    rows.append(e)
    cols.append(e)
    vals.append(inv[3 - dofmap.vertex_side[dofmap.dof_vertex[e]]])
    T = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.n_dofs, dofmap.n_dofs),
    )
    return T.tocsr()
