"""Synthetic graph models: ring, triangle ring, forest fire, Barabasi-Albert."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import GENERATION, stream


@dataclass(frozen=True)
class ForestFireConfig:
    node_count: int
    burning_probability: float
    seed: int = 0

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("forest fire needs at least one node")
        if not 0.0 <= self.burning_probability < 1.0:
            raise ValueError("burning probability must lie in [0, 1)")


@dataclass(frozen=True)
class BaConfig:
    node_count: int
    edges_per_new_node: int
    seed: int = 0

    def __post_init__(self):
        if self.edges_per_new_node < 1:
            raise ValueError("edges_per_new_node must be >= 1")
        if self.node_count <= self.edges_per_new_node:
            raise ValueError("node_count must exceed edges_per_new_node")


def ring(n: int) -> Graph:
    """Cycle graph C_n."""
    if n < 3:
        raise ValueError("a ring needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def triangle_ring(k: int) -> Graph:
    """Ring of ``k`` nodes with a pendant triangle hanging off every ring node.

    Ring node ``i`` forms a triangle with two private nodes ``k + 2i`` and
    ``k + 2i + 1``. N = 3k, E = 4k; ring nodes have degree 4 and triangle
    nodes degree 2. The uniform mode is an exact eigenvector for every k, so
    the adjacency radius is exactly 3 and the non-backtracking radius is the
    real root above 1 of (x - 1)(x^3 - 1) = 4.
    """
    if k < 3:
        raise ValueError("a triangle ring needs at least 3 ring nodes")
    edges = [(i, (i + 1) % k) for i in range(k)]
    for i in range(k):
        a, b = k + 2 * i, k + 2 * i + 1
        edges += [(i, a), (i, b), (a, b)]
    return Graph.from_edges(3 * k, edges)


def forest_fire(cfg: ForestFireConfig) -> Graph:
    """Grow a forest-fire network one node at a time.

    Each newcomer links to a uniformly chosen ambassador, then burns: while a
    draw ``a`` in (0, 1] satisfies ``a <= q`` it links to a random neighbor of
    the current ambassador that it is not yet linked to. Nodes burned from one
    ambassador become ambassadors themselves, depth first in link order. A node
    is never visited twice for the same newcomer.

    Because node ``t`` only links to nodes ``< t``, the graph after ``t``
    steps is the induced subgraph on nodes ``0..t-1``.
    """
    rng = stream(cfg.seed, GENERATION)
    q = cfg.burning_probability
    adj: list[list[int]] = [[] for _ in range(cfg.node_count)]
    edges = []
    for u in range(1, cfg.node_count):
        v = int(rng.integers(u))
        visited = {u, v}
        linked = [v]
        stack = [v]
        while stack:
            amb = stack.pop()
            burned = []
            while 1.0 - rng.random() <= q:
                options = [w for w in adj[amb] if w not in visited]
                if not options:
                    break
                w = options[int(rng.integers(len(options)))]
                visited.add(w)
                burned.append(w)
            linked.extend(burned)
            stack.extend(reversed(burned))
        for w in linked:
            adj[u].append(w)
            adj[w].append(u)
            edges.append((w, u))
    return Graph.from_edges(cfg.node_count, edges)


def barabasi_albert(cfg: BaConfig) -> Graph:
    """Preferential attachment grown from a clique on ``m + 1`` nodes."""
    rng = stream(cfg.seed, GENERATION)
    m = cfg.edges_per_new_node
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # each node appears once per incident edge end, so uniform picks from
    # this list are degree-proportional
    ends = [x for e in edges for x in e]
    for u in range(m + 1, cfg.node_count):
        targets: list[int] = []
        while len(targets) < m:
            w = ends[int(rng.integers(len(ends)))]
            if w not in targets:
                targets.append(w)
        for w in targets:
            edges.append((w, u))
            ends += [w, u]
    return Graph.from_edges(cfg.node_count, edges)
