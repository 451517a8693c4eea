"""Bond percolation: Newman-Ziff simulation and message passing.

Cluster statistics are first gathered microcanonically, i.e. as a function
of the number ``m`` of occupied edges, by adding edges in random order to a
union-find structure. Canonical curves at occupation probability ``p`` are
then binomial mixtures of the microcanonical means.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import combinations

import numba
import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from .graph import Graph
from .nbt import build_b, enumerate_paths
from .rng import run_seeds

DEFAULT_RUNS = 1000
DEFAULT_GRID = 401


class DegenerateCurveError(ValueError):
    """The second-largest cluster never grows past its empty-graph value; no threshold exists."""


class MessagePassingError(RuntimeError):
    def __init__(self, message: str, state: "MessageState"):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class RunProfile:
    """Largest and second-largest cluster sizes after each of the m = 0..E additions."""

    largest: np.ndarray
    second: np.ndarray


@dataclass(frozen=True)
class PercolationCurve:
    p_grid: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    runs: int
    seed: int | None
    s1_sem: np.ndarray | None = None
    s2_sem: np.ndarray | None = None

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("p,s1,s2\n")
        for p, a, b in zip(self.p_grid, self.s1, self.s2):
            out.write(f"{p:.12g},{a:.12g},{b:.12g}\n")
        return out.getvalue()


@dataclass(frozen=True)
class MessageState:
    theta: np.ndarray  # indexed like enumerate_paths(g, 2)
    pi: np.ndarray
    p: float
    iterations: int


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@numba.njit(cache=True)
def _nz_profile(n, src, dst, order, largest_out, second_out):
    """One Newman-Ziff sweep, writing top-two cluster sizes per step."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    # cnt[s] = number of clusters of size s
    cnt = np.zeros(n + 1, dtype=np.int64)
    cnt[1] = n
    largest = 1 if n > 0 else 0
    second = 1 if n > 1 else 0
    largest_out[0] = largest
    second_out[0] = second
    for m in range(order.shape[0]):
        e = order[m]
        a = _find(parent, src[e])
        b = _find(parent, dst[e])
        if a != b:
            sa = size[a]
            sb = size[b]
            if sa < sb:
                a, b = b, a
            parent[b] = a
            s = sa + sb
            size[a] = s
            cnt[sa] -= 1
            cnt[sb] -= 1
            cnt[s] += 1
            old = largest
            if s > largest:
                largest = s
            if cnt[largest] >= 2:
                second = largest
            else:
                cand = second
                if old < largest and old > cand:
                    cand = old
                if s < largest and s > cand:
                    cand = s
                if cand >= largest:
                    cand = largest - 1
                while cand > 0 and cnt[cand] == 0:
                    cand -= 1
                second = cand
        largest_out[m + 1] = largest
        second_out[m + 1] = second


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    e = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    return np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])


def profile_for_order(g: Graph, order: np.ndarray) -> RunProfile:
    """Run profile for a given edge insertion order (indices into ``g.edges``)."""
    src, dst = _edge_arrays(g)
    E = len(src)
    largest = np.empty(E + 1, dtype=np.int64)
    second = np.empty(E + 1, dtype=np.int64)
    _nz_profile(g.node_count, src, dst, np.asarray(order, dtype=np.int64), largest, second)
    return RunProfile(largest, second)


def newman_ziff_run(g: Graph, seed: int) -> RunProfile:
    """Add the edges in a uniformly random order and track the top two clusters."""
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    return profile_for_order(g, rng.permutation(g.edge_count))


def simulate_profiles(g: Graph, runs: int, seed: int,
                      keep_runs: bool = False) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Microcanonical mean cluster sizes (absolute) over ``runs`` sweeps.

    Returns ``(mean_largest, mean_second, per_run)`` where ``per_run`` is a
    ``(runs, 2, E + 1)`` array when ``keep_runs`` is set. Runs are summed in
    index order so the result is bit-stable.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    src, dst = _edge_arrays(g)
    E = len(src)
    acc1 = np.zeros(E + 1)
    acc2 = np.zeros(E + 1)
    largest = np.empty(E + 1, dtype=np.int64)
    second = np.empty(E + 1, dtype=np.int64)
    per_run = np.empty((runs, 2, E + 1)) if keep_runs else None
    for r, s in enumerate(run_seeds(seed, runs)):
        rng = np.random.Generator(np.random.PCG64(int(s)))
        _nz_profile(g.node_count, src, dst, rng.permutation(E), largest, second)
        acc1 += largest
        acc2 += second
        if keep_runs:
            per_run[r, 0] = largest
            per_run[r, 1] = second
    return acc1 / runs, acc2 / runs, per_run


def exact_microcanonical(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Exact microcanonical means by visiting every edge subset (small E only)."""
    E = g.edge_count
    if E > 20:
        raise ValueError("exact enumeration is limited to 20 edges")
    largest = np.zeros(E + 1)
    second = np.zeros(E + 1)
    src, dst = _edge_arrays(g)
    top1 = np.empty(E + 1, dtype=np.int64)
    top2 = np.empty(E + 1, dtype=np.int64)
    for m in range(E + 1):
        total1 = total2 = 0
        count = 0
        for subset in combinations(range(E), m):
            _nz_profile(g.node_count, src, dst, np.array(subset, dtype=np.int64), top1, top2)
            total1 += top1[m]
            total2 += top2[m]
            count += 1
        largest[m] = total1 / count
        second[m] = total2 / count
    return largest, second


def binomial_weights(E: int, p_grid: np.ndarray) -> np.ndarray:
    """``W[k, m] = C(E, m) p_k^m (1 - p_k)^(E - m)``, evaluated in log space."""
    p_grid = np.asarray(p_grid, dtype=float)
    m = np.arange(E + 1)
    log_choose = gammaln(E + 1) - gammaln(m + 1) - gammaln(E - m + 1)
    w = np.zeros((len(p_grid), E + 1))
    for k, p in enumerate(p_grid):
        if p <= 0.0:
            w[k, 0] = 1.0
        elif p >= 1.0:
            w[k, E] = 1.0
        else:
            logw = log_choose + m * np.log(p) + (E - m) * np.log1p(-p)
            w[k] = np.exp(logw)
    return w


def canonical(micro: np.ndarray, p_grid: np.ndarray) -> np.ndarray:
    """Binomial mixture of a microcanonical observable over ``m = 0..E``."""
    micro = np.asarray(micro, dtype=float)
    return binomial_weights(len(micro) - 1, p_grid) @ micro


def percolation_curves(g: Graph, runs: int = DEFAULT_RUNS, grid_size: int = DEFAULT_GRID,
                       seed: int = 0, with_sem: bool = False) -> PercolationCurve:
    """Mean relative sizes of the two largest clusters on a uniform p-grid."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    n = g.node_count
    p_grid = np.linspace(0.0, 1.0, grid_size)
    mean1, mean2, per_run = simulate_profiles(g, runs, seed, keep_runs=with_sem)
    w = binomial_weights(g.edge_count, p_grid)
    s1 = w @ mean1 / n
    s2 = w @ mean2 / n
    sem1 = sem2 = None
    if with_sem:
        c1 = per_run[:, 0, :] @ w.T / n
        c2 = per_run[:, 1, :] @ w.T / n
        ddof = 1 if runs > 1 else 0
        sem1 = c1.std(axis=0, ddof=ddof) / np.sqrt(runs)
        sem2 = c2.std(axis=0, ddof=ddof) / np.sqrt(runs)
    return PercolationCurve(p_grid, s1, s2, runs, seed, sem1, sem2)


def exact_curves(g: Graph, grid_size: int = DEFAULT_GRID) -> PercolationCurve:
    """Curves from exact microcanonical means (every edge subset)."""
    p_grid = np.linspace(0.0, 1.0, grid_size)
    mean1, mean2 = exact_microcanonical(g)
    n = g.node_count
    return PercolationCurve(p_grid, canonical(mean1, p_grid) / n,
                            canonical(mean2, p_grid) / n, 0, None)


def empirical_threshold(curve: PercolationCurve) -> tuple[float, float]:
    """Peak position of the second-largest cluster curve.

    Returns ``(p_c, resolution)``; ties go to the smaller p. A curve whose
    maximum sits at the first grid point (a single edge, a star) has no
    peak and raises ``DegenerateCurveError``.
    """
    s2 = np.asarray(curve.s2)
    if not np.any(s2 > 0):
        raise DegenerateCurveError("second-largest cluster is identically zero")
    k = int(np.argmax(s2))
    if k == 0 and curve.p_grid[0] <= 0.0:
        raise DegenerateCurveError("second-largest cluster never exceeds its value at p = 0")
    step = float(curve.p_grid[1] - curve.p_grid[0]) if len(curve.p_grid) > 1 else 0.0
    return float(curve.p_grid[k]), step


def _start_incidence(g: Graph, paths: np.ndarray) -> sp.csr_matrix:
    P = paths.shape[0]
    return sp.csr_matrix((np.ones(P), (paths[:, 0], np.arange(P))), shape=(g.node_count, P))


def message_passing_theta(g: Graph, p: float, tol: float = 1e-12,
                          max_iter: int = 100_000) -> MessageState:
    """Largest fixed point of the path messages, iterated from all ones.

    ``theta[i->j->k] = 1 - prod_{l in N(k) minus {i, j}} (1 - p * theta[j->k->l])``
    and ``pi[i] = 1 - prod over paths i->j->k of (1 - theta[i->j->k])``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    b2 = build_b(g, 2)
    succ = b2.matrix
    paths = b2.paths.paths
    theta = np.ones(len(b2.paths))
    it = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        for it in range(1, max_iter + 1):
            new = 1.0 - np.exp(succ @ np.log1p(-p * theta))
            delta = float(np.max(np.abs(new - theta))) if len(theta) else 0.0
            theta = new
            if delta <= tol:
                break
        else:
            state = MessageState(theta, _pi(g, paths, theta), p, it)
            raise MessagePassingError(f"no convergence after {max_iter} iterations "
                                      f"(last update {delta:.3g})", state)
        pi = _pi(g, paths, theta)
    return MessageState(theta, pi, p, it)


def _pi(g: Graph, paths: np.ndarray, theta: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 1.0 - np.exp(_start_incidence(g, paths) @ np.log1p(-theta))


def message_passing_s1(g: Graph, p: float, tol: float = 1e-12,
                       max_iter: int = 100_000) -> float:
    """Expected giant-cluster size (absolute) as the sum of pi."""
    return float(message_passing_theta(g, p, tol, max_iter).pi.sum())


def path_labels(g: Graph) -> list[tuple[int, int, int]]:
    """Labels of the entries of ``MessageState.theta``."""
    return list(enumerate_paths(g, 2))
