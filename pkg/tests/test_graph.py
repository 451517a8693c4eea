from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import from_nx
from percothresh.experiments import bundled_graph
from percothresh.generators import ring
from percothresh.graph import (
    Graph,
    GraphParseError,
    connected_components,
    degree_stats,
    largest_connected_component,
    parse_edge_list,
    serialize_edge_list,
    triangles_per_edge,
)


def test_parse_triangle():
    g = parse_edge_list("1 2\n2 3\n3 1\n")
    assert (g.node_count, g.edge_count) == (3, 3)


def test_parse_simplifies():
    g = parse_edge_list("% comment\n1 2\n2 1\n1 1\n")
    assert (g.node_count, g.edge_count) == (2, 1)


def test_parse_extra_columns_and_hash_comments():
    g = parse_edge_list("# konect\n10 20 1 1234\n20 30 0.5\n")
    assert g.edges == ((0, 1), (1, 2))


def test_parse_relabels_in_numeric_order():
    g = parse_edge_list("7 3\n3 9\n")
    # 3 -> 0, 7 -> 1, 9 -> 2
    assert g.edges == ((0, 1), (0, 2))


def test_parse_skips_self_loop_only_labels():
    g = parse_edge_list("5 5\n1 2\n")
    assert (g.node_count, g.edge_count) == (2, 1)
    with pytest.raises(GraphParseError):
        parse_edge_list("1 1\n")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(GraphParseError) as exc:
        parse_edge_list("1 2\n% ok\n3 x\n")
    assert exc.value.line == 3
    with pytest.raises(GraphParseError):
        parse_edge_list("1\n")
    with pytest.raises(GraphParseError):
        parse_edge_list("% nothing here\n\n")


def test_karate_counts():
    g = bundled_graph("karate")
    assert (g.node_count, g.edge_count) == (34, 78)
    assert degree_stats(g).mean_degree == pytest.approx(156 / 34)


def test_contiguous_usa_counts():
    g = bundled_graph("contiguous_usa")
    assert (g.node_count, g.edge_count) == (49, 107)
    assert len(connected_components(g)) == 1


edge_lists = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=80)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_parse_serialize_idempotent(pairs):
    text = "".join(f"{a} {b}\n" for a, b in pairs)
    if all(a == b for a, b in pairs):
        return
    g = parse_edge_list(text)
    assert parse_edge_list(serialize_edge_list(g)) == g


def test_serialize_format():
    assert serialize_edge_list(ring(4)) == "0 1\n0 3\n1 2\n2 3\n"


def test_lcc_tie_goes_to_smallest_id():
    g = Graph.from_edges(6, [(3, 4), (4, 5), (3, 5), (0, 1), (1, 2), (0, 2)])
    lcc, mapping = largest_connected_component(g)
    assert lcc.node_count == 3 and list(mapping) == [0, 1, 2]


def test_lcc_picks_triangle_over_edge():
    g = Graph.from_edges(5, [(3, 4), (0, 1), (1, 2), (0, 2)])
    lcc, mapping = largest_connected_component(g)
    assert lcc.edge_count == 3 and list(mapping) == [0, 1, 2]


def test_lcc_connected_is_identity():
    g = ring(7)
    lcc, mapping = largest_connected_component(g)
    assert lcc == g and list(mapping) == list(range(7))


def test_lcc_empty_graph_errors():
    with pytest.raises(ValueError):
        largest_connected_component(Graph.from_edges(0, []))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.floats(0.0, 0.2), st.integers(0, 2**31))
def test_lcc_matches_networkx(n, p, seed):
    G = nx.gnp_random_graph(n, p, seed=seed)
    g = from_nx(G)
    lcc, mapping = largest_connected_component(g)
    assert lcc.node_count == max(len(c) for c in nx.connected_components(G))
    assert len(connected_components(lcc)) == 1
    for u, v in lcc.edges:
        assert g.has_edge(int(mapping[u]), int(mapping[v]))


def test_degree_stats_examples():
    s = degree_stats(ring(8))
    assert (s.mean_degree, s.mean_square_degree, s.reduction_factor) == (2, 4, 0.5)
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    s = degree_stats(star)
    assert (s.mean_degree, s.mean_square_degree, s.reduction_factor) == (1.5, 3, 0.5)


def test_triangles_examples():
    assert set(triangles_per_edge(from_nx(nx.complete_graph(3))).values()) == {1}
    assert set(triangles_per_edge(ring(6)).values()) == {0}
    assert set(triangles_per_edge(from_nx(nx.complete_graph(4))).values()) == {2}


@pytest.mark.parametrize("seed", range(10))
def test_triangles_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 51))
    g = from_nx(nx.gnp_random_graph(n, float(rng.uniform(0.05, 0.4)), seed=seed))
    counts = triangles_per_edge(g)
    brute = sum(1 for a, b, c in combinations(range(n), 3)
                if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c))
    assert sum(counts[e] for e in g.edges) == 3 * brute
    for (u, v), c in counts.items():
        assert c == counts[(v, u)]


def test_adjacency_matches_edges():
    g = ring(5)
    a = g.adjacency().toarray()
    assert np.array_equal(a, a.T) and a.sum() == 10
