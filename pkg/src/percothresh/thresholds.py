"""Percolation threshold estimates from spectral radii."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .graph import Graph, degree_stats
from .nbt import DEFAULT_PATH_CAP, build_b
from .spectral import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    SpectralResult,
    spectral_radius,
    spectral_radius_of_b2_via_m,
)


class ConvergenceError(RuntimeError):
    """Spectral solver gave up; ``result`` holds the partial estimate."""

    def __init__(self, order: int, result: SpectralResult):
        self.order = order
        self.result = result
        super().__init__(f"order {order}: spectral solver did not converge "
                         f"after {result.iterations} iterations (residual {result.residual:.3g})")


@dataclass(frozen=True)
class EstimateOptions:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    fast: str = "auto"  # "auto" | "on" | "off": route order 2 through M
    path_cap: int = DEFAULT_PATH_CAP

    def __post_init__(self):
        if self.fast not in ("auto", "on", "off"):
            raise ValueError(f"fast must be auto, on or off, not {self.fast!r}")


@dataclass(frozen=True)
class ThresholdEstimate:
    order: int
    lam: float
    pc: float
    clamped: bool
    method: str
    spectral: SpectralResult | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("spectral")
        d["lambda"] = d.pop("lam")
        return d


@dataclass(frozen=True)
class ErrorReport:
    empirical: float
    relative_errors: dict[int, float]
    non_monotone: list[tuple[int, int]]


def threshold_from_lambda(order: int, result: SpectralResult) -> ThresholdEstimate:
    lam = result.radius
    if lam > 1.0:
        return ThresholdEstimate(order, lam, 1.0 / lam, False, result.method, result)
    # 1/lambda would leave [0, 1]; the bond threshold is 1 in that regime
    return ThresholdEstimate(order, lam, 1.0, True, result.method, result)


def use_fast_route(g: Graph, opts: EstimateOptions) -> bool:
    if opts.fast == "on":
        return True
    if opts.fast == "off":
        return False
    # M has 8E rows against P2 = 4E * <d^2>/(4<d>) - 2E for B2
    return degree_stats(g).reduction_factor > 1.0


def estimate_pc(g: Graph, order: int, opts: EstimateOptions | None = None) -> ThresholdEstimate:
    """``1 / lambda`` for the order-``order`` non-backtracking matrix.

    Order 0 is the adjacency matrix. Spectral radii not above 1 (including
    the exact zero of an acyclic path graph) clamp the estimate to 1 and set
    ``clamped``.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    opts = opts or EstimateOptions()
    if order == 2 and use_fast_route(g, opts):
        res = spectral_radius_of_b2_via_m(g, opts.tol, opts.max_iter, path_cap=opts.path_cap)
    else:
        res = spectral_radius(build_b(g, order, opts.path_cap), opts.tol, opts.max_iter)
    if not res.converged:
        raise ConvergenceError(order, res)
    return threshold_from_lambda(order, res)


def compare(estimates: list[ThresholdEstimate], empirical: float) -> ErrorReport:
    """Relative errors ``(p_c - estimate) / p_c`` and any order inversions."""
    if empirical <= 0:
        raise ValueError("empirical threshold must be positive")
    errors = {e.order: (empirical - e.pc) / empirical for e in estimates}
    ordered = sorted(estimates, key=lambda e: e.order)
    flags = [(a.order, b.order) for a, b in zip(ordered, ordered[1:]) if b.pc < a.pc - 1e-9]
    return ErrorReport(empirical, errors, flags)


def degree_moment_threshold(g: Graph) -> float:
    """<d> / (<d^2> - <d>), the uncorrelated random-graph estimate."""
    st = degree_stats(g)
    return st.mean_degree / (st.mean_square_degree - st.mean_degree)
