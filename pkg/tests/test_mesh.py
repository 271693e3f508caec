import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nxfem.mesh import (
    build_uniform_cube_mesh,
    build_uniform_mesh,
    build_uniform_square_mesh,
    level_subdivisions,
    mesh_hierarchy,
    refine,
)


def test_single_square():
    m = build_uniform_square_mesh(1)
    assert m.n_simplices == 2 and m.n_vertices == 4
    assert m.signed_volumes().sum() == pytest.approx(1.0, abs=1e-15)


def test_single_cube():
    m = build_uniform_cube_mesh(1)
    assert m.n_simplices == 6
    assert m.signed_volumes().sum() == pytest.approx(1.0, abs=1e-15)


def test_n4_vertex_degrees_by_enumeration():
    m = build_uniform_square_mesh(4)
    assert m.n_simplices == 32
    deg = np.zeros(m.n_vertices, dtype=int)
    for tri in m.simplices:
        for v in tri:
            deg[v] += 1
    # the bottom-left/top-right diagonals give every interior vertex 6 triangles
    assert set(deg[~m.boundary_vertex]) == {6}
    # corners on the diagonal direction carry 2 triangles, the other two carry 1
    corners = [0, 4, 20, 24]
    assert sorted(deg[corners]) == [1, 1, 2, 2]
    assert deg[0] == 2 and deg[24] == 2


def test_diagonal_direction():
    m = build_uniform_square_mesh(1)
    edges = {tuple(sorted(e)) for t in m.simplices for e in itertools.combinations(t, 2)}
    assert (0, 3) in edges and (1, 2) not in edges


def test_level_mapping():
    assert [level_subdivisions(2, k) for k in (1, 2, 3, 4)] == [8, 16, 32, 64]
    assert [level_subdivisions(3, k) for k in (0, 2, 6)] == [2, 8, 128]
    assert build_uniform_mesh(2, level_subdivisions(2, 2)).n_subdiv == 16


def test_l6_vertex_count():
    # vertex count only; the mesh itself is not built at this size
    n = level_subdivisions(3, 6)
    assert (n + 1) ** 3 == pytest.approx(2.15e6, rel=0.01)


@pytest.mark.parametrize("dim", [2, 3])
def test_refine_nests(dim):
    c = build_uniform_mesh(dim, 2)
    f = refine(c)
    assert f.n_subdiv == 4
    fine = {tuple(np.round(v * 4).astype(int)) for v in f.vertices}
    for v in c.vertices:
        assert tuple(np.round(v * 4).astype(int)) in fine
        # coordinates match exactly, not just after rounding
        assert np.min(np.abs(f.vertices - v).max(axis=1)) < 1e-14


def test_refine_3d_count_and_volume():
    f = refine(build_uniform_cube_mesh(2))
    assert f.n_simplices == 6 * 4**3
    assert f.signed_volumes().sum() == pytest.approx(1.0, abs=1e-12)


@given(st.integers(1, 9), st.sampled_from([2, 3]))
def test_mesh_invariants(n, dim):
    if dim == 3:
        n = min(n, 5)
    m = build_uniform_mesh(dim, n)
    vol = m.signed_volumes()
    assert np.all(vol > 0)
    assert abs(vol.sum() - 1.0) < 1e-12
    on_face = np.any((m.vertices == 0) | (m.vertices == 1), axis=1)
    assert np.array_equal(on_face, m.boundary_vertex)
    assert m.n_vertices == (n + 1) ** dim


@pytest.mark.parametrize("dim,n", [(2, 3), (3, 2)])
def test_conforming(dim, n):
    """Every interior facet is shared by exactly two simplices, boundary facets by one."""
    m = build_uniform_mesh(dim, n)
    count = {}
    for s in m.simplices:
        for f in itertools.combinations(sorted(s), dim):
            count[f] = count.get(f, 0) + 1
    for f, c in count.items():
        on_boundary = np.any(np.all(m.vertices[list(f)] == 0, axis=0)) or np.any(
            np.all(m.vertices[list(f)] == 1, axis=0)
        )
        assert c == (1 if on_boundary else 2)


def test_hierarchy():
    ms = mesh_hierarchy(2, 2, 3)
    assert [m.n_subdiv for m in ms] == [2, 4, 8]


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_rejects_bad_n(bad):
    with pytest.raises(ValueError):
        build_uniform_square_mesh(bad)


def test_rejects_bad_dim():
    with pytest.raises(ValueError):
        build_uniform_mesh(4, 2)
