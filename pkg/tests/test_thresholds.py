import networkx as nx
import numpy as np
import pytest

from conftest import from_nx, random_connected
from percothresh.experiments import bundled_graph
from percothresh.generators import ring, triangle_ring
from percothresh.graph import Graph
from percothresh.spectral import DAG, KRYLOV_M, SpectralResult
from percothresh.thresholds import (
    ConvergenceError,
    EstimateOptions,
    ThresholdEstimate,
    compare,
    degree_moment_threshold,
    estimate_pc,
    threshold_from_lambda,
    use_fast_route,
)


def est(order, pc):
    return ThresholdEstimate(order, 1 / pc, pc, False, "test")


def test_ring_estimates():
    g = ring(200)
    assert estimate_pc(g, 0).pc == pytest.approx(0.5, abs=1e-9)
    one = estimate_pc(g, 1)
    assert one.pc == 1.0 and one.clamped


def test_triangle_ring_order2():
    e = estimate_pc(triangle_ring(20), 2)
    assert e.pc == 1.0 and e.lam == 1.0


def test_karate_estimates():
    g = bundled_graph("karate")
    got = [estimate_pc(g, o).pc for o in range(3)]
    assert got == pytest.approx([0.1487, 0.1889, 0.2097], abs=5e-4)


def test_clamp_on_zero_radius():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    e = estimate_pc(star, 1)
    assert (e.pc, e.clamped, e.lam, e.method) == (1.0, True, 0.0, DAG)


def test_threshold_from_lambda():
    e = threshold_from_lambda(1, SpectralResult(4.0, 10, True, 0.0, "x"))
    assert (e.pc, e.clamped) == (0.25, False)
    e = threshold_from_lambda(1, SpectralResult(0.7, 10, True, 0.0, "x"))
    assert (e.pc, e.clamped) == (1.0, True)


def test_pc_times_lambda():
    g = bundled_graph("contiguous_usa")
    for o in range(4):
        e = estimate_pc(g, o)
        assert e.clamped or e.pc * e.lam == pytest.approx(1.0, rel=1e-15)


def test_fast_route_selection():
    karate = bundled_graph("karate")
    assert use_fast_route(karate, EstimateOptions())
    assert not use_fast_route(ring(10), EstimateOptions())
    assert use_fast_route(ring(10), EstimateOptions(fast="on"))
    assert not use_fast_route(karate, EstimateOptions(fast="off"))
    with pytest.raises(ValueError):
        EstimateOptions(fast="maybe")


@pytest.mark.parametrize("seed", range(8))
def test_fast_and_explicit_agree(seed):
    g = random_connected(np.random.default_rng(seed), 15, 30, 0.15, 0.35)
    fast = estimate_pc(g, 2, EstimateOptions(fast="on"))
    slow = estimate_pc(g, 2, EstimateOptions(fast="off"))
    if fast.method == KRYLOV_M:
        assert fast.pc == pytest.approx(slow.pc, abs=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_estimates_monotone(seed):
    g = random_connected(np.random.default_rng(100 + seed), 8, 25, 0.1, 0.4)
    pcs = [estimate_pc(g, o).pc for o in range(4)]
    assert all(b >= a - 1e-9 for a, b in zip(pcs, pcs[1:]))
    assert pcs[-1] <= 1.0


def test_convergence_error():
    with pytest.raises(ConvergenceError) as exc:
        estimate_pc(bundled_graph("karate"), 1, EstimateOptions(tol=1e-15, max_iter=2))
    assert exc.value.order == 1 and not exc.value.result.converged
    with pytest.raises(ValueError):
        estimate_pc(ring(5), -1)


def test_compare_karate():
    rep = compare([est(0, 0.1487), est(1, 0.1889), est(2, 0.2097)], 0.2310)
    errs = [rep.relative_errors[o] for o in range(3)]
    assert errs == pytest.approx([0.356, 0.182, 0.092], abs=1e-3)
    assert rep.non_monotone == []


def test_compare_usa():
    rep = compare([est(0, 0.1880), est(1, 0.2400), est(2, 0.2723)], 0.3610)
    errs = [rep.relative_errors[o] for o in range(3)]
    assert errs == pytest.approx([0.479, 0.335, 0.246], abs=1e-3)


def test_compare_exact_and_flags():
    rep = compare([est(0, 0.3), est(1, 0.3)], 0.3)
    assert rep.relative_errors == {0: 0.0, 1: 0.0}
    rep = compare([est(0, 0.3), est(1, 0.2)], 0.3)
    assert rep.non_monotone == [(0, 1)]
    with pytest.raises(ValueError):
        compare([est(0, 0.3)], 0.0)


def test_degree_moment_threshold():
    # regular graph of degree d: d / (d^2 - d) = 1 / (d - 1)
    assert degree_moment_threshold(from_nx(nx.complete_graph(5))) == pytest.approx(1 / 3)


def test_to_dict():
    d = estimate_pc(ring(10), 0).to_dict()
    assert d["lambda"] == pytest.approx(2.0) and "spectral" not in d
