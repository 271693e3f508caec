"""Uniform simplicial meshes of the unit square and unit cube.

Vertices are numbered lexicographically with x fastest, so the vertex at
grid index ``(i, j[, k])`` has number ``i + (n+1) j [+ (n+1)^2 k]``.  Doubling
``n`` reproduces every coarse vertex at grid index ``2 * (i, j[, k])``, which
is what the multigrid prolongation relies on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SimplicialMesh:
    dim: int
    n_subdiv: int
    vertices: np.ndarray = field(repr=False)
    simplices: np.ndarray = field(repr=False)
    boundary_vertex: np.ndarray = field(repr=False)
    h: float

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_simplices(self) -> int:
        return self.simplices.shape[0]

    def signed_volumes(self) -> np.ndarray:
        x = self.vertices[self.simplices]
        edges = x[:, 1:, :] - x[:, :1, :]
        return np.linalg.det(edges) / math.factorial(self.dim)

    def grid_index(self) -> np.ndarray:
        """Integer grid coordinates of every vertex, shape (n_vertices, dim)."""
        return np.rint(self.vertices * self.n_subdiv).astype(np.int64)

    def interior_vertices(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_vertex)


def _grid_vertices(n: int, dim: int) -> np.ndarray:
    ticks = np.arange(n + 1) / n
    # x varies fastest
    mesh = np.meshgrid(*([ticks] * dim), indexing="ij")
    return np.stack([m.ravel(order="F") for m in mesh], axis=1)


def _check_n(n_subdiv: int) -> None:
    if int(n_subdiv) != n_subdiv or n_subdiv < 1:
        raise ValueError(f"n_subdiv must be a positive integer, got {n_subdiv!r}")


def _finish(dim: int, n: int, vertices: np.ndarray, simplices: np.ndarray) -> SimplicialMesh:
    boundary = np.any((vertices <= 0.0) | (vertices >= 1.0), axis=1)
    x = vertices[simplices]
    edges = x[:, 1:, :] - x[:, :1, :]
    neg = np.linalg.det(edges) < 0
    if np.any(neg):
        simplices = simplices.copy()
        simplices[neg, 0], simplices[neg, 1] = simplices[neg, 1], simplices[neg, 0].copy()
    for a in (vertices, simplices, boundary):
        a.setflags(write=False)
    return SimplicialMesh(
        dim=dim,
        n_subdiv=n,
        vertices=vertices,
        simplices=simplices,
        boundary_vertex=boundary,
        h=math.sqrt(dim) / n,
    )


def build_uniform_square_mesh(n_subdiv: int) -> SimplicialMesh:
    """n x n squares, each cut along its bottom-left to top-right diagonal."""
    _check_n(n_subdiv)
    n = int(n_subdiv)
    vertices = _grid_vertices(n, 2)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(order="F"), j.ravel(order="F")
    v00 = i + (n + 1) * j
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    lower = np.stack([v00, v10, v11], axis=1)
    upper = np.stack([v00, v11, v01], axis=1)
    simplices = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return _finish(2, n, vertices, simplices)


def build_uniform_cube_mesh(n_subdiv: int) -> SimplicialMesh:
    """n^3 cubes, each split into the 6 Kuhn tetrahedra around its main diagonal."""
    _check_n(n_subdiv)
    n = int(n_subdiv)
    vertices = _grid_vertices(n, 3)
    stride = np.array([1, n + 1, (n + 1) ** 2])
    g = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    base = sum(stride[a] * g[a].ravel(order="F") for a in range(3))
    tets = []
    for perm in itertools.permutations(range(3)):
        offs = [0]
        for axis in perm:
            offs.append(offs[-1] + stride[axis])
        tets.append(np.stack([base + o for o in offs], axis=1))
    simplices = np.stack(tets, axis=1).reshape(-1, 4)
    return _finish(3, n, vertices, simplices)


def build_uniform_mesh(dim: int, n_subdiv: int) -> SimplicialMesh:
    if dim == 2:
        return build_uniform_square_mesh(n_subdiv)
    if dim == 3:
        return build_uniform_cube_mesh(n_subdiv)
    raise ValueError(f"dim must be 2 or 3, got {dim}")


def refine(mesh: SimplicialMesh) -> SimplicialMesh:
    return build_uniform_mesh(mesh.dim, 2 * mesh.n_subdiv)


def mesh_hierarchy(dim: int, n_coarse: int, n_levels: int) -> list[SimplicialMesh]:
    """Nested meshes from ``n_coarse`` up, ``n_levels`` meshes in total."""
    meshes = [build_uniform_mesh(dim, n_coarse)]
    for _ in range(n_levels - 1):
        meshes.append(refine(meshes[-1]))
    return meshes


def level_subdivisions(dim: int, level: int) -> int:
    """Subdivisions per axis of experiment level ``L<level>``.

    2D: L1 = 8, L2 = 16, ...  (L2 is the 1/16 grid; L1 follows by halving).
    3D: L0 = 2, L1 = 4, ...
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    return 2 ** (level + 2) if dim == 2 else 2 ** (level + 1)
