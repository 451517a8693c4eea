"""Simple undirected graphs, edge-list ingestion and basic structural statistics."""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp


class GraphParseError(ValueError):
    """Raised when an edge-list file cannot be interpreted."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on nodes ``0..node_count-1``.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    sorted ascending. ``neighbors[i]`` is the sorted neighbor array of node i.
    Construct through :meth:`from_edges`, which simplifies its input.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[np.ndarray, ...] = field(repr=False)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, dropping self-loops and collapsing duplicate edges."""
        clean = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            if u == v:
                continue
            clean.add((u, v) if u < v else (v, u))
        ordered = tuple(sorted(clean))
        buckets: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in ordered:
            buckets[u].append(v)
            buckets[v].append(u)
        nbrs = []
        for b in buckets:
            arr = np.array(sorted(b), dtype=np.int64)
            arr.setflags(write=False)
            nbrs.append(arr)
        return cls(node_count, ordered, tuple(nbrs))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(n) for n in self.neighbors], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors[u]
        k = np.searchsorted(nb, v)
        return bool(k < len(nb) and nb[k] == v)

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = (np.concatenate(self.neighbors) if self.node_count
                   else np.zeros(0, dtype=np.int64))
        data = np.ones(len(indices), dtype=np.float64)
        n = self.node_count
        return sp.csr_matrix((data, indices, indptr), shape=(n, n))

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the adjacency structure."""
        a = self.adjacency()
        return a.indptr.astype(np.int64), a.indices.astype(np.int64)

    def subgraph(self, nodes: Iterable[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph; nodes are relabeled in ascending original order.

        Returns the subgraph and the map new id -> original id.
        """
        keep = np.array(sorted(set(int(n) for n in nodes)), dtype=np.int64)
        new_id = {int(o): i for i, o in enumerate(keep)}
        sub = [(new_id[u], new_id[v]) for u, v in self.edges if u in new_id and v in new_id]
        return Graph.from_edges(len(keep), sub), keep

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))


@dataclass(frozen=True)
class DegreeStats:
    mean_degree: float
    mean_square_degree: float
    reduction_factor: float


def parse_edge_list(source: str | TextIO) -> Graph:
    """Parse a whitespace-separated edge list (Konect style).

    Lines starting with ``%`` or ``#`` are comments. Only the first two
    columns are read; weights or timestamps after them are ignored.
    Self-loop lines are skipped, duplicate edges collapse, and the labels
    that remain are compacted to ``0..N-1`` in ascending numeric order, so
    re-parsing :func:`serialize_edge_list` output gives back the same graph.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    pairs = []
    seen_line = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        seen_line = True
        tokens = line.split()
        if len(tokens) < 2:
            raise GraphParseError("expected two node labels", lineno)
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"non-integer node label in {line!r}", lineno) from None
        if a != b:
            pairs.append((a, b))
    if not pairs:
        raise GraphParseError("edge list has no edges" if seen_line else "empty edge list")
    labels = {lab: i for i, lab in enumerate(sorted({x for p in pairs for x in p}))}
    return Graph.from_edges(len(labels), [(labels[a], labels[b]) for a, b in pairs])


def load_edge_list(path: str | Path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def serialize_edge_list(g: Graph) -> str:
    """One ``u v`` line per edge, ``u < v``, ascending."""
    return "".join(f"{u} {v}\n" for u, v in g.edges)


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by their smallest node."""
    seen = np.zeros(g.node_count, dtype=bool)
    comps = []
    for start in range(g.node_count):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        comp = []
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in g.neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(int(w))
        comps.append(sorted(comp))
    return comps


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Largest component and the map new id -> original id.

    Ties go to the component holding the smallest original node id.
    """
    if g.node_count == 0:
        raise ValueError("empty graph has no components")
    comps = connected_components(g)
    # comps is ordered by smallest member, so max() keeps the first of equals
    best = max(comps, key=len)
    if len(best) == g.node_count:
        return g, np.arange(g.node_count, dtype=np.int64)
    return g.subgraph(best)


def degree_stats(g: Graph) -> DegreeStats:
    if g.node_count < 1:
        raise ValueError("degree statistics need at least one node")
    d = [int(x) for x in g.degrees]
    n = len(d)
    s1 = sum(d)
    s2 = sum(x * x for x in d)
    mean = Fraction(s1, n)
    mean_sq = Fraction(s2, n)
    factor = mean_sq / (4 * mean) if s1 else Fraction(0)
    return DegreeStats(float(mean), float(mean_sq), float(factor))


def triangles_per_edge(g: Graph) -> dict[tuple[int, int], int]:
    """Triangle count of every directed edge ``i -> j`` (both orientations)."""
    counts = {}
    for u, v in g.edges:
        c = len(np.intersect1d(g.neighbors[u], g.neighbors[v], assume_unique=True))
        counts[(u, v)] = c
        counts[(v, u)] = c
    return counts
