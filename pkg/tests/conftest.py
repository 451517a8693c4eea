import networkx as nx
import numpy as np
import pytest

from percothresh.graph import Graph, largest_connected_component


def from_nx(G) -> Graph:
    G = nx.convert_node_labels_to_integers(G)
    return Graph.from_edges(G.number_of_nodes(), G.edges())


def random_connected(rng: np.random.Generator, n_lo: int, n_hi: int, p_lo: float,
                     p_hi: float) -> Graph:
    """LCC of a G(n, p) draw with at least one edge."""
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        p = float(rng.uniform(p_lo, p_hi))
        g, _ = largest_connected_component(
            from_nx(nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))))
        if g.edge_count > 0:
            return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]:8s} {name}")
