import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from conftest import from_nx, random_connected
from percothresh.experiments import bundled_graph
from percothresh.generators import ring, triangle_ring
from percothresh.graph import Graph
from percothresh.nbt import assemble_m, build_b
from percothresh.spectral import (
    DAG,
    KRYLOV_M,
    POWER,
    block_eigenvalues,
    dag_check,
    dense_eigenvalues,
    is_exceptional_m_eigenvalue,
    power_spectral_radius,
    spectral_radius,
    spectral_radius_of_b2_via_m,
)

K3 = from_nx(nx.complete_graph(3))
STAR = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


def test_power_ring():
    assert power_spectral_radius(build_b(ring(8), 0)).radius == pytest.approx(2.0, abs=1e-10)
    res = power_spectral_radius(build_b(ring(8), 1))
    assert res.converged and res.radius == pytest.approx(1.0, abs=1e-10)


def test_power_karate_adjacency():
    res = power_spectral_radius(build_b(bundled_graph("karate"), 0))
    assert res.radius == pytest.approx(6.7257, abs=1e-3)
    assert res.converged and res.residual <= 1e-10 and res.method == POWER


def test_power_rejects_negative():
    with pytest.raises(ValueError):
        power_spectral_radius(sp.csr_matrix(np.array([[0.0, -1.0], [1.0, 0.0]])))


def test_power_empty_and_nonconvergence():
    assert power_spectral_radius(sp.csr_matrix((0, 0))).radius == 0.0
    res = power_spectral_radius(build_b(bundled_graph("karate"), 1), tol=1e-14, max_iter=3)
    assert not res.converged and res.iterations == 3


@pytest.mark.parametrize("seed", range(10))
def test_power_matches_dense_symmetric(seed):
    g = random_connected(np.random.default_rng(seed), 10, 40, 0.1, 0.4)
    a = build_b(g, 0)
    dense = np.abs(dense_eigenvalues(a, 5000)[0])
    assert power_spectral_radius(a).radius == pytest.approx(dense, abs=1e-9)


def test_dag_check_examples():
    assert dag_check(build_b(STAR, 1))
    assert dag_check(build_b(K3, 2))
    assert not dag_check(build_b(ring(5), 3))
    assert dag_check(build_b(ring(5), 4))
    assert not dag_check(build_b(ring(5), 0))


def test_spectral_radius_declares_zero():
    res = spectral_radius(build_b(ring(5), 4))
    assert (res.radius, res.method, res.converged) == (0.0, DAG, True)


def test_dense_ring4_b1():
    vals = dense_eigenvalues(build_b(ring(4), 1))
    expected = np.array([1, 1, 1j, 1j, -1, -1, -1j, -1j])
    assert np.allclose(np.sort_complex(np.round(vals, 10)), np.sort_complex(expected))
    assert np.allclose(np.abs(vals), 1)


def test_dense_zero_and_cap():
    assert np.all(dense_eigenvalues(build_b(K3, 2)) == 0)
    with pytest.raises(ValueError):
        dense_eigenvalues(build_b(bundled_graph("karate"), 2), dim_cap=100)


def test_dense_ordering():
    vals = dense_eigenvalues(build_b(bundled_graph("karate"), 1))
    mods = np.abs(vals)
    assert np.all(np.diff(mods) <= 1e-12)


def test_m_of_k3_only_exceptional():
    vals = dense_eigenvalues(assemble_m(K3))
    nonzero = vals[np.abs(vals) > 1e-6]
    assert len(nonzero) > 0
    assert all(is_exceptional_m_eigenvalue(z, 1e-6) for z in nonzero)


def test_block_eigenvalues_keep_nonzero_spectrum():
    g = triangle_ring(5)
    full = dense_eigenvalues(build_b(g, 1))
    blocks = block_eigenvalues(build_b(g, 1))
    big = lambda v: np.sort_complex(np.round(v[np.abs(v) > 1e-6], 8))
    assert np.allclose(big(full), big(blocks))


def test_via_m_karate():
    res = spectral_radius_of_b2_via_m(bundled_graph("karate"))
    assert res.method == KRYLOV_M and res.converged
    assert res.radius == pytest.approx(4.769, abs=5e-3)
    direct = spectral_radius(build_b(bundled_graph("karate"), 2))
    assert res.radius == pytest.approx(direct.radius, abs=1e-8)


def test_via_m_ring_falls_back():
    res = spectral_radius_of_b2_via_m(ring(6))
    assert res.method != KRYLOV_M
    assert res.radius == pytest.approx(spectral_radius(build_b(ring(6), 1)).radius, abs=1e-9)


def test_via_m_tree_is_zero():
    res = spectral_radius_of_b2_via_m(STAR)
    assert res.radius == 0.0 and res.method == DAG


def test_result_serialization():
    d = spectral_radius(build_b(ring(5), 0)).to_dict()
    assert set(d) == {"radius", "iterations", "converged", "residual", "method"}
