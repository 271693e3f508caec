"""Rounded-box level set and cut-element geometry of its P1 interpolant.

Negative level-set values mark subdomain 1 (inside), positive values
subdomain 2.  All cut quantities come from the piecewise linear interpolant
of the vertex values, so every interface piece is flat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import SimplicialMesh

INSIDE_1 = 1
INSIDE_2 = 2
CUT = 0

DEFAULT_SNAP_TOL = 1e-10


@dataclass(frozen=True)
class RoundedBoxLevelSet:
    """Signed distance to a box of half-side ``half_side`` grown by ``corner_radius``."""

    center: tuple[float, ...]
    half_side: float = 0.2
    corner_radius: float = 0.05

    def __post_init__(self):
        if self.half_side <= 0 or self.corner_radius <= 0:
            raise ValueError("half_side and corner_radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        q = np.abs(x - np.asarray(self.center)) - self.half_side
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside - self.corner_radius


def eval_levelset(ls: RoundedBoxLevelSet, x):
    return ls(x)


def experiment_levelset(dim: int, shift: float, half_side=0.2, corner_radius=0.05):
    """Rounded box centred at ``(0.5, ..., 0.5) + shift * (1, ..., 1)``."""
    return RoundedBoxLevelSet((0.5 + shift,) * dim, half_side, corner_radius)


def vertex_levelset(mesh: SimplicialMesh, ls, snap_tol: float = DEFAULT_SNAP_TOL) -> np.ndarray:
    """Level-set values at the mesh vertices, with near-zeros pushed to side 2."""
    if snap_tol < 0:
        raise ValueError("snap_tol must be non-negative")
    values = np.array(ls(mesh.vertices), dtype=float)
    eps = snap_tol * mesh.h
    values[np.abs(values) < eps] = eps
    # exact zeros survive only when snap_tol == 0
    values[values == 0.0] = np.finfo(float).tiny
    return values


def simplex_volume(x: np.ndarray) -> float:
    """Unsigned volume of one simplex given as a (d+1, d) coordinate array."""
    d = x.shape[1]
    return abs(np.linalg.det(x[1:] - x[0])) / math.factorial(d)


def facet_measure(x: np.ndarray) -> float:
    """Measure of a (d-1)-simplex embedded in R^d, given as (d, d) coordinates."""
    e = x[1:] - x[0]
    if e.shape[0] == 1:
        return float(np.linalg.norm(e[0]))
    return 0.5 * float(np.linalg.norm(np.cross(e[0], e[1])))


def hat_gradients(x: np.ndarray) -> np.ndarray:
    """Gradients of the d+1 barycentric hats on a simplex, shape (d+1, d)."""
    e = x[1:] - x[0]
    g = np.linalg.solve(e, np.eye(e.shape[0])).T  # rows: grad of lambda_1..lambda_d
    return np.vstack([-g.sum(axis=0), g])


def barycentric(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of ``points`` (k, d) in simplex ``x``; shape (k, d+1)."""
    e = x[1:] - x[0]
    lam = np.linalg.solve(e.T, (np.atleast_2d(points) - x[0]).T).T
    return np.hstack([1.0 - lam.sum(axis=1, keepdims=True), lam])


def _prism_tets(a, b):
    """Three tets filling the prism with triangles ``a``, ``b`` and lateral edges a[i]-b[i]."""
    return [
        np.array([a[0], a[1], a[2], b[2]]),
        np.array([a[0], a[1], b[1], b[2]]),
        np.array([a[0], b[0], b[1], b[2]]),
    ]


@dataclass
class CutElement:
    element: int
    coords: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    volume: float
    measure1: float
    measure2: float
    normal: np.ndarray
    facets: list = field(repr=False)
    sub_simplices: dict = field(repr=False)
    intersections: np.ndarray = field(repr=False)

    @property
    def kappa1(self) -> float:
        return self.measure1 / self.volume

    @property
    def kappa2(self) -> float:
        return self.measure2 / self.volume

    @property
    def interface_measure(self) -> float:
        return sum(facet_measure(f) for f in self.facets)

    def side_measure(self, side: int) -> float:
        return self.measure1 if side == 1 else self.measure2


def _edge_point(xa, xb, fa, fb):
    t = fa / (fa - fb)
    return xa + t * (xb - xa)


def cut_simplex(coords: np.ndarray, values: np.ndarray, element: int = -1) -> CutElement:
    """Split one simplex along the zero set of the linear interpolant of ``values``."""
    coords = np.asarray(coords, dtype=float)
    values = np.asarray(values, dtype=float)
    d = coords.shape[1]
    if not np.all(np.isfinite(values)) or np.any(values == 0.0):
        raise ValueError(f"element {element}: level-set values must be finite and non-zero")
    neg = np.flatnonzero(values < 0)
    pos = np.flatnonzero(values > 0)
    if len(neg) == 0 or len(pos) == 0:
        raise ValueError(f"element {element} is not cut")

    def p(a, b):
        return _edge_point(coords[a], coords[b], values[a], values[b])

    if d == 2:
        lone, rest, lone_side = (neg, pos, 1) if len(neg) == 1 else (pos, neg, 2)
        a = lone[0]
        b, c = rest
        pab, pac = p(a, b), p(a, c)
        small = [np.array([coords[a], pab, pac])]
        if np.linalg.norm(pab - coords[c]) <= np.linalg.norm(coords[b] - pac):
            big = [np.array([pab, coords[b], coords[c]]), np.array([pab, coords[c], pac])]
        else:
            big = [np.array([pab, coords[b], pac]), np.array([coords[b], coords[c], pac])]
        facets = [np.array([pab, pac])]
        inter = np.array([pab, pac])
        subs = {lone_side: small, 3 - lone_side: big}
    elif d == 3:
        if len(neg) == 1 or len(pos) == 1:
            lone, rest, lone_side = (neg, pos, 1) if len(neg) == 1 else (pos, neg, 2)
            a = lone[0]
            b, c, e = rest
            pts = [p(a, b), p(a, c), p(a, e)]
            small = [np.array([coords[a], *pts])]
            big = _prism_tets(pts, [coords[b], coords[c], coords[e]])
            facets = [np.array(pts)]
            inter = np.array(pts)
            subs = {lone_side: small, 3 - lone_side: big}
        else:
            a, b = neg
            c, e = pos
            pac, pae, pbc, pbe = p(a, c), p(a, e), p(b, c), p(b, e)
            side1 = _prism_tets([coords[a], pac, pae], [coords[b], pbc, pbe])
            side2 = _prism_tets([coords[c], pac, pbc], [coords[e], pae, pbe])
            facets = [np.array([pac, pbc, pbe]), np.array([pac, pbe, pae])]
            inter = np.array([pac, pbc, pbe, pae])
            subs = {1: side1, 2: side2}
    else:
        raise ValueError(f"unsupported dimension {d}")

    grad = values @ hat_gradients(coords)
    normal = grad / np.linalg.norm(grad)
    m1 = sum(simplex_volume(s) for s in subs[1])
    m2 = sum(simplex_volume(s) for s in subs[2])
    return CutElement(
        element=element,
        coords=coords,
        values=values,
        volume=simplex_volume(coords),
        measure1=m1,
        measure2=m2,
        normal=normal,
        facets=facets,
        sub_simplices=subs,
        intersections=inter,
    )


@dataclass(frozen=True)
class CutData:
    element_class: np.ndarray = field(repr=False)
    vertex_side: np.ndarray = field(repr=False)
    vertex_values: np.ndarray = field(repr=False)
    cut_elements: list = field(repr=False)

    @property
    def n_cut(self) -> int:
        return len(self.cut_elements)

    def cut_element_ids(self) -> np.ndarray:
        return np.array([c.element for c in self.cut_elements], dtype=np.int64)

    def interface_measure(self) -> float:
        return sum(c.interface_measure for c in self.cut_elements)


def compute_cut(mesh: SimplicialMesh, vertex_values) -> CutData:
    values = np.array(vertex_values, dtype=float)
    if values.shape != (mesh.n_vertices,):
        raise ValueError("need one level-set value per vertex")
    if not np.all(np.isfinite(values)) or np.any(values == 0.0):
        raise ValueError("level-set values must be finite and non-zero; snap them first")
    sv = values[mesh.simplices]
    any_neg = np.any(sv < 0, axis=1)
    any_pos = np.any(sv > 0, axis=1)
    cls = np.full(mesh.n_simplices, CUT, dtype=np.int8)
    cls[any_neg & ~any_pos] = INSIDE_1
    cls[any_pos & ~any_neg] = INSIDE_2
    cut = [
        cut_simplex(mesh.vertices[mesh.simplices[e]], sv[e], element=int(e))
        for e in np.flatnonzero(cls == CUT)
    ]
    side = np.where(values < 0, 1, 2).astype(np.int8)
    for a in (cls, side, values):
        a.setflags(write=False)
    return CutData(element_class=cls, vertex_side=side, vertex_values=values, cut_elements=cut)
