"""Spectral radius estimation for the non-backtracking family."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.sparse.csgraph import connected_components

from .graph import Graph
from .nbt import DEFAULT_PATH_CAP, MOperator, SparseOperator, assemble_m, build_b

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DENSE_CAP = 2000
M_ACCEPT_MARGIN = 1e-6
KRYLOV_DIM = 30
CLUSTER_TOL = 1e-3

POWER = "power_shifted"
DENSE = "dense_oracle"
KRYLOV_M = "krylov_m"
DAG = "declared_zero_dag"

EXCEPTIONAL_M_EIGENVALUES = (
    complex(-1.0, 0.0),
    complex(0.5, np.sqrt(3) / 2),
    complex(0.5, -np.sqrt(3) / 2),
)


@dataclass(frozen=True)
class SpectralResult:
    radius: float
    iterations: int
    converged: bool
    residual: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)


def _matrix(op) -> sp.spmatrix:
    return op.matrix if isinstance(op, SparseOperator) else sp.csr_matrix(op)


def power_spectral_radius(op, tol: float = DEFAULT_TOL,
                          max_iter: int = DEFAULT_MAX_ITER) -> SpectralResult:
    """Perron root of a nonnegative matrix by power iteration on ``op + I``.

    The unit shift leaves eigenvectors alone and breaks the periodicity that
    stalls plain power iteration on permutation-like matrices such as the
    non-backtracking matrix of a ring.

    The spectral radius is the largest radius over the strongly connected
    components, so the iteration runs on the block-diagonal part made of
    nontrivial components, with each block normalised on its own. Per block
    the Collatz-Wielandt quotients ``min (Av)_i / v_i <= rho <= max (Av)_i / v_i``
    bracket the root; ``residual`` is the final width of the bracket on the
    overall maximum, and the reported radius is its midpoint.
    """
    mat = _matrix(op).tocsr()
    n = mat.shape[0]
    if n == 0:
        return SpectralResult(0.0, 0, True, 0.0, POWER)
    if mat.nnz and mat.data.min() < 0:
        raise ValueError("power iteration needs a nonnegative operator")
    mat = mat.copy()
    mat.eliminate_zeros()
    n_scc, labels = connected_components(mat, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=n_scc)
    loops = np.zeros(n_scc, dtype=bool)
    diag = mat.diagonal()
    loops[labels[diag != 0]] = True
    live = (sizes > 1) | loops
    if not live.any():
        return SpectralResult(0.0, 0, True, 0.0, POWER)
    keep = np.flatnonzero(live[labels])
    keep = keep[np.argsort(labels[keep], kind="stable")]
    comp = labels[keep]
    sub = mat[keep][:, keep].tocoo()
    internal = comp[sub.row] == comp[sub.col]
    m = len(keep)
    block = sp.csr_matrix((sub.data[internal], (sub.row[internal], sub.col[internal])),
                          shape=(m, m))
    shifted = (block + sp.identity(m, format="csr")).tocsr()
    starts = np.flatnonzero(np.r_[True, comp[1:] != comp[:-1]])
    v = np.ones(m)
    lo = hi = 0.0
    for it in range(1, max_iter + 1):
        w = shifted @ v
        ratio = w / v
        lo = float(np.minimum.reduceat(ratio, starts).max())
        hi = float(np.maximum.reduceat(ratio, starts).max())
        if hi - lo <= tol:
            return SpectralResult(0.5 * (lo + hi) - 1.0, it, True, hi - lo, POWER)
        scale = np.sqrt(np.add.reduceat(w * w, starts))
        v = w / np.repeat(scale, np.diff(np.r_[starts, m]))
    return SpectralResult(0.5 * (lo + hi) - 1.0, max_iter, False, hi - lo, POWER)


def dag_check(op) -> bool:
    """True when the 0/1 pattern of ``op`` is a directed acyclic graph."""
    mat = _matrix(op)
    n = mat.shape[0]
    if n == 0:
        return True
    if np.any(mat.diagonal() != 0):
        return False
    n_scc, _ = connected_components(mat, directed=True, connection="strong")
    return n_scc == n


def dense_eigenvalues(op, dim_cap: int = DENSE_CAP) -> np.ndarray:
    """Full spectrum, ordered by modulus, then real part, then imaginary part (desc)."""
    if isinstance(op, MOperator):
        op = op.to_sparse()
    mat = _matrix(op)
    n = mat.shape[0]
    if n > dim_cap:
        raise ValueError(f"dimension {n} exceeds the dense cap {dim_cap}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    vals = np.linalg.eigvals(mat.toarray()).astype(complex)
    order = np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))
    return vals[order]


def block_eigenvalues(op, dim_cap: int = DENSE_CAP,
                      cluster_tol: float | None = CLUSTER_TOL) -> np.ndarray:
    """Eigenvalues from the nontrivial strongly connected blocks of ``op``.

    Trivial blocks (single index, no loop) only carry exact zeros and are
    skipped, so the result holds the full nonzero spectrum and usually far
    fewer zeros than ``dense_eigenvalues``. A defective eigenvalue comes
    back from LAPACK as a ring of points of radius about eps**(1/k) around
    the true value; with ``cluster_tol`` set, points are grouped by
    single linkage at that distance and each group is replaced by its
    mean, which stays accurate to roundoff.
    """
    if isinstance(op, MOperator):
        op = op.to_sparse()
    mat = _matrix(op).tocsr().copy()
    mat.eliminate_zeros()
    n = mat.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    n_scc, labels = connected_components(mat, directed=True, connection="strong")
    parts = []
    for c in range(n_scc):
        idx = np.flatnonzero(labels == c)
        if len(idx) > dim_cap:
            raise ValueError(f"block of size {len(idx)} exceeds the dense cap {dim_cap}")
        blk = mat[idx][:, idx].toarray()
        if len(idx) == 1 and blk[0, 0] == 0:
            continue
        parts.append(np.linalg.eigvals(blk).astype(complex))
    vals = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    if cluster_tol and len(vals) > 1:
        groups = fcluster(linkage(np.c_[vals.real, vals.imag], "single"),
                          cluster_tol, "distance")
        for c in np.unique(groups):
            sel = groups == c
            vals[sel] = vals[sel].mean()
    order = np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))
    return vals[order]


def spectral_radius(op, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> SpectralResult:
    """Power iteration, short-circuited to an exact zero for acyclic patterns."""
    if dag_check(op):
        return SpectralResult(0.0, 0, True, 0.0, DAG)
    return power_spectral_radius(op, tol, max_iter)


def spectral_radius_of_b2_via_m(g: Graph, tol: float = DEFAULT_TOL,
                                max_iter: int = DEFAULT_MAX_ITER,
                                krylov_dim: int = KRYLOV_DIM,
                                path_cap: int = DEFAULT_PATH_CAP) -> SpectralResult:
    """Second-order radius from the 8E-dimensional matrix M.

    M carries every nonzero eigenvalue of B^(2) plus, possibly, -1 and
    (1 +- sqrt(3) i) / 2. Those extras have modulus one, so a real
    dominant Ritz value clearly above 1 must be the B^(2) radius. Anything
    else falls back to power iteration on B^(2) itself.
    """
    m = assemble_m(g)
    if m.dimension >= 3:
        ncv = max(min(krylov_dim, m.dimension - 1), 3)
        try:
            vals, vecs = spla.eigs(m.as_linear_operator(), k=1, which="LM", ncv=ncv,
                                   tol=min(tol, 1e-12), maxiter=max_iter,
                                   v0=np.ones(m.dimension))
        except spla.ArpackNoConvergence:
            log.debug("Arnoldi on M did not converge; falling back to B2")
        except (ValueError, RuntimeError) as exc:
            log.debug("Arnoldi on M failed (%s); falling back to B2", exc)
        else:
            value = complex(vals[0])
            mod = abs(value)
            if mod > 1.0 + M_ACCEPT_MARGIN and value.real > 0 and abs(value.imag) <= 1e-8 * mod:
                z = vecs[:, 0].real
                z /= np.linalg.norm(z)
                resid = float(np.linalg.norm(m.matvec(z) - value.real * z))
                if resid <= tol:
                    return SpectralResult(value.real, 0, True, resid, KRYLOV_M)
                log.debug("M eigenpair residual %.3g above tol; falling back to B2", resid)
    return spectral_radius(build_b(g, 2, path_cap), tol, max_iter)


def is_exceptional_m_eigenvalue(z: complex, atol: float = 1e-8) -> bool:
    return any(abs(z - e) <= atol for e in EXCEPTIONAL_M_EIGENVALUES)
