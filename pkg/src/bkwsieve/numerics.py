"""Quadrature, running integrals and a deterministic box-constrained minimizer."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import minimize

PENALTY = 1e30


class ToleranceNotReached(ArithmeticError):
    pass


class NonFiniteIntegrand(ArithmeticError):
    pass


class NoFeasiblePoint(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")


@dataclass(frozen=True)
class MinimizerSpec:
    multistart_grid: int | Sequence[int] = 12
    param_tol: float = 1e-6
    objective_tol: float = 1e-9
    max_iters: int = 10_000
    refine: int = 4

    def grid_counts(self, ndim: int) -> list[int]:
        if isinstance(self.multistart_grid, int):
            return [self.multistart_grid] * ndim
        counts = list(self.multistart_grid)
        if len(counts) != ndim:
            raise ValueError(f"multistart_grid has {len(counts)} entries for {ndim} dimensions")
        return counts


# 15-point Kronrod rule with its embedded 7-point Gauss rule, on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


def _eval(f, x):
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(y)):
        raise NonFiniteIntegrand(f"integrand returned non-finite values near x={x.ravel()[0]:.6g}")
    return y


def _gk15(f, a, b):
    """Kronrod estimate and |K15 - G7| for panels [a_i, b_i] (arrays of equal shape)."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    y = _eval(f, 0.5 * (a + b) + half * _XK)
    k = half[..., 0] * (y @ _WK)
    g = half[..., 0] * (y @ _WG)
    return k, np.abs(k - g)


def integrate(f: Callable, lo: float, hi: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[lo, hi]``.

    ``f`` is called with numpy arrays of nodes and must broadcast.
    """
    if hi < lo:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    if hi == lo:
        return 0.0
    val, err = _gk15(f, lo, hi)
    heap = [(-float(err), lo, hi, float(val))]
    total, total_err = float(val), float(err)
    n = 1
    while True:
        if total_err <= spec.abs_tol or n & (n - 1) == 0:
            # incremental updates drift; resum before trusting the estimate
            total = sum(item[3] for item in heap)
            total_err = -sum(item[0] for item in heap)
            if total_err <= spec.abs_tol:
                return total
        if n >= spec.max_subdivisions:
            raise ToleranceNotReached(
                f"error estimate {total_err:.3g} > {spec.abs_tol:.3g} after {n} subdivisions"
            )
        neg_err, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            raise ToleranceNotReached(f"interval [{a}, {b}] cannot be split further")
        (v1, v2), (e1, e2) = _gk15(f, np.array([a, m]), np.array([m, b]))
        total += float(v1) + float(v2) - v
        total_err += float(e1) + float(e2) + neg_err
        heapq.heappush(heap, (-float(e1), a, m, float(v1)))
        heapq.heappush(heap, (-float(e2), m, b, float(v2)))
        n += 1


class CumulativeIntegral:
    """``t -> integral_0^t f`` stored on a grid.

    With the integrand values at the grid points available the interpolant is
    the cubic Hermite spline that uses them as exact derivatives; otherwise a
    monotone PCHIP. Both reproduce the stored values at grid points exactly.
    """

    def __init__(self, grid, values, derivatives=None):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.values[0] != 0.0:
            raise ValueError("cumulative integral must start at 0")
        self.derivatives = None if derivatives is None else np.asarray(derivatives, dtype=float)
        if self.derivatives is not None:
            self._interp = CubicHermiteSpline(self.grid, self.values, self.derivatives)
        else:
            self._interp = PchipInterpolator(self.grid, self.values)

    def __call__(self, t):
        out = self._interp(t)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def total(self) -> float:
        return float(self.values[-1])


def cumulative(f: Callable, T: float, grid_points: int = 513,
               spec: QuadratureSpec = QuadratureSpec(),
               panel_subdivisions: int = 1024) -> CumulativeIntegral:
    """Running integral of ``f`` on a uniform grid over ``[0, T]``.

    Every panel gets one vectorized Gauss-Kronrod pass; panels whose error
    estimate exceeds their share of ``abs_tol`` are redone adaptively with at
    most ``panel_subdivisions`` subdivisions each (near-singular integrands
    raise ToleranceNotReached rather than grinding on).
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if grid_points < 65:
        raise ValueError("grid_points must be at least 65")
    grid = np.linspace(0.0, T, grid_points)
    panels, err = _gk15(f, grid[:-1], grid[1:])
    share = spec.abs_tol / (grid_points - 1)
    bad = np.nonzero(err > share)[0]
    if bad.size:
        sub = QuadratureSpec(share, min(spec.max_subdivisions, panel_subdivisions))
        panels = panels.copy()
        for i in bad:
            panels[i] = integrate(f, grid[i], grid[i + 1], sub)
    values = np.concatenate([[0.0], np.cumsum(panels)])
    return CumulativeIntegral(grid, values, _eval(f, grid))


def _lattice(lower, upper, counts):
    axes = [np.linspace(lo, hi, k) if k > 1 else np.array([0.5 * (lo + hi)])
            for lo, hi, k in zip(lower, upper, counts)]
    return [np.array(p) for p in itertools.product(*axes)]


def minimize_box(f: Callable, lower, upper, spec: MinimizerSpec = MinimizerSpec(),
                 extra_starts=()):
    """Deterministic multistart Nelder-Mead on the box ``[lower, upper]``.

    Values ``>= PENALTY`` mark infeasible points. The lattice of start points is
    evaluated, the best ``spec.refine`` (plus ``extra_starts``) are polished.
    Returns ``(x, value, info)`` with ``info = {"evals", "converged"}``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or np.any(lower >= upper):
        raise ValueError("need lower < upper componentwise")
    evals = 0

    def fx(x):
        nonlocal evals
        evals += 1
        v = float(f(np.clip(x, lower, upper)))
        return v if np.isfinite(v) else PENALTY

    probes = [(fx(p), tuple(p)) for p in _lattice(lower, upper, spec.grid_counts(len(lower)))]
    feasible = sorted(p for p in probes if p[0] < PENALTY)
    if not feasible:
        raise NoFeasiblePoint("every multistart probe hit the penalty value")
    starts = [np.array(x) for _, x in feasible[: spec.refine]]
    starts += [np.clip(np.asarray(x, dtype=float), lower, upper) for x in extra_starts]

    step = (upper - lower) / (2.0 * np.maximum(np.array(spec.grid_counts(len(lower))) - 1, 1))
    results = []
    for x0 in starts:
        simplex = [x0]
        for d in range(len(x0)):
            v = x0.copy()
            v[d] = v[d] + step[d] if v[d] + step[d] <= upper[d] else v[d] - step[d]
            simplex.append(v)
        res = minimize(fx, x0, method="Nelder-Mead", bounds=list(zip(lower, upper)),
                       options={"xatol": spec.param_tol, "fatol": spec.objective_tol,
                                "maxiter": spec.max_iters, "maxfev": spec.max_iters,
                                "initial_simplex": np.array(simplex)})
        x = np.clip(res.x, lower, upper)
        results.append((float(res.fun), tuple(x), bool(res.success)))
    # also keep the raw lattice optimum in case polishing made things worse
    results.append((feasible[0][0], feasible[0][1], False))
    value, x, ok = min(results, key=lambda r: (r[0], r[1]))
    return np.array(x), value, {"evals": evals, "converged": ok or any(r[2] for r in results[:-1])}
