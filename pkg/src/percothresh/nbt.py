"""High-order non-backtracking matrices and the triangle-corrected matrix M.

``B^(g)`` is indexed by directed paths of ``g`` steps over ``g + 1`` distinct
nodes. Path ``(i1, ..., i_{g+1})`` points to ``(i2, ..., i_{g+2})`` whenever
the concatenation ``(i1, ..., i_{g+2})`` is itself a path of distinct nodes.
``B^(0)`` is the adjacency matrix and ``B^(1)`` the usual non-backtracking
matrix over the ``2E`` directed edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import Graph

DEFAULT_PATH_CAP = 10_000_000


class PathLimitError(MemoryError):
    """Raised when a path enumeration would exceed the configured cap."""


@dataclass(frozen=True, eq=False)
class DirectedPathSet:
    """Directed paths of a fixed order, one per row, in lexicographic order."""

    order: int
    node_count: int
    paths: np.ndarray  # shape (P_g, order + 1)
    _keys: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.paths.shape[0]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.paths:
            yield tuple(int(x) for x in row)

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        """Row ids of the given paths (shape ``(k, order + 1)``); -1 if absent."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.order + 1)
        if len(self) == 0:
            return np.full(rows.shape[0], -1, dtype=np.int64)
        keys = _encode(rows, self.node_count)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, len(self) - 1)
        return np.where(self._keys[pos] == keys, pos, -1)

    def index(self, path: tuple[int, ...]) -> int:
        k = int(self.index_of(np.array([path]))[0])
        if k < 0:
            raise KeyError(path)
        return k


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """A square sparse matrix tagged with what it represents.

    ``paths`` gives the row/column labels when the operator is indexed by
    directed paths.
    """

    matrix: sp.csr_matrix
    tag: str
    paths: DirectedPathSet | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dump(self) -> str:
        """Coordinate triples ``row col value``, one per stored entry."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return "".join(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:g}\n" for k in order)

    def entries(self) -> set[tuple]:
        """Nonzero positions labelled by path tuples (or ints if unlabelled)."""
        coo = self.matrix.tocoo()
        if self.paths is None:
            return {(int(r), int(c)) for r, c in zip(coo.row, coo.col)}
        p = self.paths.paths
        return {(tuple(int(x) for x in p[r]), tuple(int(x) for x in p[c]))
                for r, c in zip(coo.row, coo.col)}


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    """Mixed-radix key preserving lexicographic order of node tuples."""
    width = rows.shape[1]
    if n ** width >= 2 ** 63:
        # object ints never overflow; only hit for very long paths on big graphs
        keys = np.zeros(rows.shape[0], dtype=object)
        for c in range(width):
            keys = keys * n + rows[:, c].astype(object)
        return keys
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for c in range(width):
        keys = keys * n + rows[:, c]
    return keys


def _path_set(order: int, n: int, paths: np.ndarray) -> DirectedPathSet:
    paths.setflags(write=False)
    return DirectedPathSet(order, n, paths, _encode(paths, n))


def _extend(g: Graph, paths: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Append every admissible next node to each path.

    Returns the extended paths and, for each, the row id of its prefix. Input
    order is lexicographic and neighbor lists are sorted, so the output is too.
    """
    indptr, indices = g.csr_arrays()
    last = paths[:, -1]
    counts = indptr[last + 1] - indptr[last]
    total = int(counts.sum())
    if total > cap:
        raise PathLimitError(f"{total} candidate paths exceed the cap of {cap}")
    parent = np.repeat(np.arange(paths.shape[0], dtype=np.int64), counts)
    # position of each candidate inside its parent's neighbor list
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    nxt = indices[np.repeat(indptr[last], counts) + offsets]
    fresh = np.all(paths[parent] != nxt[:, None], axis=1)
    parent, nxt = parent[fresh], nxt[fresh]
    return np.column_stack([paths[parent], nxt]), parent


def enumerate_paths(g: Graph, order: int, cap: int = DEFAULT_PATH_CAP) -> DirectedPathSet:
    """All directed paths with ``order`` steps and distinct nodes."""
    if order < 0:
        raise ValueError("order must be non-negative")
    paths = np.arange(g.node_count, dtype=np.int64).reshape(-1, 1)
    for _ in range(order):
        paths, _ = _extend(g, paths, cap)
    if len(paths) > cap:
        raise PathLimitError(f"{len(paths)} paths exceed the cap of {cap}")
    return _path_set(order, g.node_count, np.ascontiguousarray(paths))


def build_b(g: Graph, order: int, cap: int = DEFAULT_PATH_CAP) -> SparseOperator:
    """The order-``g`` non-backtracking matrix, built by path extension."""
    ps = enumerate_paths(g, order, cap)
    longer, rows = _extend(g, ps.paths, cap)
    cols = ps.index_of(longer[:, 1:])
    dim = len(ps)
    mat = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dim, dim))
    mat.sort_indices()
    return SparseOperator(mat, f"B{order}", ps)


def edge_index(g: Graph) -> DirectedPathSet:
    """The ``2E`` directed edges in lexicographic order (order-1 paths)."""
    return enumerate_paths(g, 1)


def _edge_operator(g: Graph, rows, cols, vals, tag: str) -> SparseOperator:
    ps = edge_index(g)
    dim = len(ps)
    mat = sp.csr_matrix((np.asarray(vals, dtype=float), (np.asarray(rows, dtype=np.int64),
                                                          np.asarray(cols, dtype=np.int64))),
                        shape=(dim, dim))
    mat.eliminate_zeros()
    mat.sort_indices()
    return SparseOperator(mat, tag, ps)


def build_delta_b1(g: Graph) -> SparseOperator:
    """Non-backtracking steps ``i->j, j->l`` whose endpoints i and l are adjacent."""
    b = build_b(g, 1)
    p = b.paths.paths
    coo = b.matrix.tocoo()
    i = p[coo.row, 0]
    ell = p[coo.col, 1]
    closes = np.array([g.has_edge(a, c) for a, c in zip(i, ell)], dtype=bool)
    return _edge_operator(g, coo.row[closes], coo.col[closes], np.ones(closes.sum()), "dB1")


def build_delta_b2(g: Graph) -> SparseOperator:
    """Entry ``(i->j, k->i)`` is 1 when i, j, k form a triangle."""
    ps = edge_index(g)
    rows, cols = [], []
    for r, (i, j) in enumerate(ps.paths):
        common = np.intersect1d(g.neighbors[i], g.neighbors[j], assume_unique=True)
        if len(common):
            back = np.column_stack([common, np.full(len(common), i)])
            rows.extend([r] * len(common))
            cols.extend(ps.index_of(back))
    return _edge_operator(g, rows, cols, np.ones(len(rows)), "dB2")


def build_d_delta(g: Graph) -> SparseOperator:
    """Diagonal matrix of per-edge triangle counts."""
    ps = edge_index(g)
    counts = [len(np.intersect1d(g.neighbors[i], g.neighbors[j], assume_unique=True))
              for i, j in ps.paths]
    idx = np.arange(len(ps))
    return _edge_operator(g, idx, idx, counts, "Ddelta")


class MOperator:
    """The 8E x 8E block matrix M, kept in block form.

    Top block row is ``[B, -dB2, Ddelta - I, B - dB1]``; the three rows below
    shift the blocks down by one (identity on the sub-diagonal). Only the
    four top-row blocks are stored.
    """

    def __init__(self, b1: SparseOperator, db1: SparseOperator,
                 db2: SparseOperator, dd: SparseOperator):
        self.edges = b1.paths
        n = b1.dimension
        eye = sp.identity(n, format="csr")
        self.blocks = (
            b1.matrix,
            (-db2.matrix).tocsr(),
            (dd.matrix - eye).tocsr(),
            (b1.matrix - db1.matrix).tocsr(),
        )
        for blk in self.blocks:
            blk.eliminate_zeros()
        self.block_dim = n
        self.dimension = 4 * n
        self.tag = "M"

    def matvec(self, z: np.ndarray) -> np.ndarray:
        n = self.block_dim
        z = np.asarray(z)
        parts = [z[k * n:(k + 1) * n] for k in range(4)]
        top = sum(blk @ x for blk, x in zip(self.blocks, parts))
        return np.concatenate([top, parts[0], parts[1], parts[2]])

    def as_linear_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator((self.dimension, self.dimension), matvec=self.matvec,
                                   dtype=np.float64)

    def to_sparse(self) -> SparseOperator:
        n = self.block_dim
        eye = sp.identity(n, format="csr")
        zero = None
        mat = sp.bmat([
            list(self.blocks),
            [eye, zero, zero, zero],
            [zero, eye, zero, zero],
            [zero, zero, eye, zero],
        ], format="csr")
        if mat.shape != (self.dimension, self.dimension):
            mat.resize((self.dimension, self.dimension))
        mat.eliminate_zeros()
        mat.sort_indices()
        return SparseOperator(mat, "M")


def assemble_m(g: Graph) -> MOperator:
    return MOperator(build_b(g, 1), build_delta_b1(g), build_delta_b2(g), build_d_delta(g))


def build_via_line_graph(g: Graph, order: int) -> SparseOperator:
    """Order-``order`` matrix built by repeated line-graph construction.

    Starting from the graph itself (order 0), each step takes the line graph
    of the previous path graph and deletes every edge that lies on a simple
    cycle of length ``step + 1``. This is deliberately slow and independent of
    :func:`build_b`; it exists to cross-check it on small graphs.
    """
    if order < 1:
        raise ValueError("line-graph construction starts at order 1")
    # directed edge lists keyed by path tuples
    succ: dict[tuple, list[tuple]] = {(i,): [(int(j),) for j in g.neighbors[i]]
                                      for i in range(g.node_count)}
    for step in range(1, order + 1):
        # nodes of the line graph are the edges u -> v, labelled by u + v[-1:]
        line: dict[tuple, list[tuple]] = {}
        for u, outs in succ.items():
            for v in outs:
                line[u + v[-1:]] = []
        for u, outs in succ.items():
            for v in outs:
                alpha = u + v[-1:]
                for w in succ.get(v, ()):
                    line[alpha].append(v + w[-1:])
        cycle_len = step + 1
        doomed = set()
        for alpha, outs in line.items():
            for beta in outs:
                if _on_cycle(line, alpha, beta, cycle_len):
                    doomed.add((alpha, beta))
        succ = {a: [b for b in outs if (a, b) not in doomed] for a, outs in line.items()}
    labels = sorted(succ)
    ps = _path_set(order, g.node_count,
                   np.array(labels, dtype=np.int64).reshape(len(labels), order + 1))
    pos = {lab: k for k, lab in enumerate(labels)}
    rows = [pos[a] for a, outs in succ.items() for _ in outs]
    cols = [pos[b] for outs in succ.values() for b in outs]
    dim = len(labels)
    mat = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dim, dim))
    mat.sort_indices()
    return SparseOperator(mat, f"B{order}-line", ps)


def _on_cycle(adj: dict, alpha, beta, length: int) -> bool:
    """Is the edge alpha -> beta on a simple directed cycle of exactly ``length``?"""
    if alpha == beta:
        return length == 1
    # search beta ~> alpha with length - 1 edges over distinct nodes
    stack = [(beta, 1, {alpha, beta})]
    while stack:
        node, used, seen = stack.pop()
        for nxt in adj.get(node, ()):
            if nxt == alpha:
                if used + 1 == length:
                    return True
                continue
            if used + 1 < length and nxt not in seen:
                stack.append((nxt, used + 1, seen | {nxt}))
    return False
