"""Per-dimension time exponent lambda(gamma) of lattice sieving with spherical filters.

A sieving step with reduction factor ``gamma`` looks for pairs at angle
``theta = 2*asin(gamma/2)`` in a list of ``(1/sin theta)**n`` vectors. Buckets
are spherical caps of angle ``alpha`` around random filter directions; a
vector is inserted into every bucket whose cap contains it, and a query
compares against the contents of the buckets it falls in.

Exponents below are base-2 and per dimension, e.g. ``cap_exponent(a)`` is
``log2`` of the relative cap volume divided by ``n``.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar

from .core import SQRT2, Compute, DomainError

GAMMA_MIN = 0.05
DEFAULT_GRID_SIZE = 1024
SCAN_POINTS = 256
ANGLE_TOL = 1e-9
# Calibration targets for gamma = 1.
LAMBDA1 = {Compute.CLASSICAL: 0.292, Compute.QUANTUM: 0.265}
CALIBRATION_TOL = 1e-3
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class FilterGeometry:
    theta: float
    alpha_filter: float


def cap_exponent(a: float) -> float:
    if not 0.0 < a <= _HALF_PI:
        raise DomainError(f"cap angle must be in (0, pi/2], got {a}")
    return math.log2(math.sin(a))


def wedge_exponent(a: float, b: float, t: float) -> float:
    """Exponent of the intersection of two caps (angles a, b) whose centers are t apart.

    Returns ``-inf`` when the intersection is asymptotically empty.
    """
    if not (0.0 < a <= _HALF_PI and 0.0 < b <= _HALF_PI and 0.0 < t <= _HALF_PI):
        raise DomainError(f"wedge angles out of range: a={a}, b={b}, t={t}")
    ca, cb = math.cos(a), math.cos(b)
    arg = 1.0 - (ca * ca + cb * cb - 2.0 * ca * cb * math.cos(t)) / math.sin(t) ** 2
    if arg <= 1e-15:
        return -math.inf
    return 0.5 * math.log2(arg)


def reduction_angle(gamma: float) -> float:
    return 2.0 * math.asin(gamma / 2.0)


def list_exponent(gamma: float) -> float:
    """``-log2 sin(theta)``; ``sin theta = gamma*sqrt(1 - gamma^2/4)`` avoids the asin round trip."""
    return -math.log2(gamma * math.sqrt(1.0 - 0.25 * gamma * gamma))


def _cost_terms(alpha, theta: float, list_exp: float, quantum: bool):
    """(insert/probe cost, candidate cost) for filter angle(s) ``alpha``; vectorized.

    filters      m    = -wedge(alpha, alpha, theta)
    insert/probe m + cap(alpha)
    candidates   L + m + 2*cap(alpha)   (bucket holds 2^{(L + cap) n} vectors)
    Grover halves the candidate term in the quantum model.
    """
    alpha = np.asarray(alpha, dtype=float)
    c2 = np.cos(alpha) ** 2
    arg = 1.0 - 2.0 * c2 / (1.0 + math.cos(theta))
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(arg > 0, -0.5 * np.log2(np.where(arg > 0, arg, 1.0)), np.inf)
        cap = 0.5 * np.log2(1.0 - c2)
    candidates = list_exp + m + 2.0 * cap
    if quantum:
        candidates = 0.5 * candidates
    return m + cap, candidates


def _per_query_cost(alpha, theta, list_exp, quantum):
    return np.maximum(*_cost_terms(alpha, theta, list_exp, quantum))


def optimal_filter(gamma: float, compute: Compute | str = Compute.CLASSICAL):
    """Return ``(lambda, FilterGeometry)`` at the cost-minimizing filter angle.

    The insert cost shrinks and the candidate cost grows with the filter
    angle, so the optimum is normally where they cross; that crossing is
    located with a root finder. Brent minimization covers the case where the
    scan does not bracket a crossing.
    """
    compute = Compute(compute)
    if not GAMMA_MIN <= gamma <= SQRT2 * (1 + 1e-12):
        raise DomainError(f"gamma must lie in [{GAMMA_MIN}, sqrt(2)], got {gamma}")
    gamma = min(gamma, SQRT2)
    theta = reduction_angle(gamma)
    if gamma >= SQRT2 * (1 - 1e-15):
        # theta = pi/2: unit list, costs vanish as the caps become hemispheres.
        return 0.0, FilterGeometry(_HALF_PI, _HALF_PI)
    L = list_exponent(gamma)
    quantum = compute is Compute.QUANTUM
    lo, hi = 0.5 * theta, _HALF_PI
    grid = lo + (hi - lo) * (np.arange(1, SCAN_POINTS + 1) / (SCAN_POINTS + 1))
    vals = _per_query_cost(grid, theta, L, quantum)
    i = int(np.argmin(vals))
    a = grid[i - 1] if i > 0 else lo
    b = grid[i + 1] if i < SCAN_POINTS - 1 else hi

    def cost(x):
        return float(_per_query_cost(x, theta, L, quantum))

    def gap(x):
        ins, cand = _cost_terms(x, theta, L, quantum)
        return float(ins - cand)

    candidates = [(float(vals[i]), float(grid[i]))]
    if 0 < i < SCAN_POINTS - 1 and gap(a) * gap(b) < 0:
        x = brentq(gap, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        candidates.append((cost(x), x))
    res = minimize_scalar(cost, bounds=(a, b), method="bounded", options={"xatol": ANGLE_TOL})
    candidates.append((float(res.fun), float(res.x)))
    best, alpha = min(candidates)
    return L + best, FilterGeometry(theta, alpha)


def lambda_at(gamma: float, compute: Compute | str = Compute.CLASSICAL) -> float:
    return optimal_filter(gamma, compute)[0]


def _row(gamma: float) -> tuple[float, float]:
    return lambda_at(gamma, Compute.CLASSICAL), lambda_at(gamma, Compute.QUANTUM)


class SieveCostModel:
    """Tabulated lambda(gamma) for both compute models, PCHIP-interpolated.

    Immutable once built; ``lam`` accepts scalars or arrays.
    """

    def __init__(self, gamma_grid, lambda_classical, lambda_quantum):
        self.gamma_grid = np.array(gamma_grid, dtype=float)
        self.lambda_classical = np.array(lambda_classical, dtype=float)
        self.lambda_quantum = np.array(lambda_quantum, dtype=float)
        for arr in (self.gamma_grid, self.lambda_classical, self.lambda_quantum):
            arr.setflags(write=False)
        if self.gamma_grid.ndim != 1 or len(self.gamma_grid) < 2:
            raise ValueError("gamma grid must be a 1-d array with at least two points")
        if np.any(np.diff(self.gamma_grid) <= 0):
            raise ValueError("gamma grid must be strictly increasing")
        if not (self.lambda_classical.shape == self.lambda_quantum.shape == self.gamma_grid.shape):
            raise ValueError("lambda columns must match the gamma grid")
        self._interp = {
            Compute.CLASSICAL: PchipInterpolator(self.gamma_grid, self.lambda_classical),
            Compute.QUANTUM: PchipInterpolator(self.gamma_grid, self.lambda_quantum),
        }
        self.gamma_lo = float(self.gamma_grid[0])
        self.gamma_hi = float(self.gamma_grid[-1])

    def lam(self, gamma, compute: Compute | str = Compute.CLASSICAL):
        g = np.asarray(gamma, dtype=float)
        if g.size and (np.min(g) < self.gamma_lo * (1 - 1e-12) or np.max(g) > self.gamma_hi * (1 + 1e-12)):
            raise DomainError(
                f"gamma outside tabulated range [{self.gamma_lo}, {self.gamma_hi}]"
            )
        out = self._interp[Compute(compute)](np.clip(g, self.gamma_lo, self.gamma_hi))
        return float(out) if out.ndim == 0 else out

    def check_calibration(self) -> None:
        for compute, target in LAMBDA1.items():
            val = self.lam(1.0, compute)
            if abs(val - target) > CALIBRATION_TOL:
                raise ValueError(f"lambda(1) {compute.value} = {val:.6f}, expected {target} +- 1e-3")
        for name, col in (("classical", self.lambda_classical), ("quantum", self.lambda_quantum)):
            if np.any(np.diff(col) > 1e-12):
                raise ValueError(f"{name} lambda table is not non-increasing in gamma")
            if np.any(col[self.gamma_grid < SQRT2 * (1 - 1e-9)] <= 0):
                raise ValueError(f"{name} lambda table has non-positive entries below sqrt(2)")
        if np.any(self.lambda_quantum > self.lambda_classical + 1e-12):
            raise ValueError("quantum lambda exceeds classical lambda somewhere on the grid")

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma", "lambda_classical", "lambda_quantum"])
            for row in zip(self.gamma_grid, self.lambda_classical, self.lambda_quantum):
                w.writerow([f"{v:.12g}" for v in row])

    @classmethod
    def load_csv(cls, path) -> "SieveCostModel":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["gamma", "lambda_classical", "lambda_quantum"]:
                raise ValueError(f"unexpected lambda cache header {header}")
            rows = np.array([[float(x) for x in r] for r in reader if r])
        # 12 significant digits put sqrt(2) a hair below itself
        if abs(rows[-1, 0] - SQRT2) < 1e-9:
            rows[-1, 0] = SQRT2
        model = cls(rows[:, 0], rows[:, 1], rows[:, 2])
        model.check_calibration()
        return model


def build_model(grid_size: int = DEFAULT_GRID_SIZE, workers: int | None = None) -> SieveCostModel:
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    grid = np.linspace(GAMMA_MIN, SQRT2, grid_size)
    grid[-1] = SQRT2
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_row, grid, chunksize=32))
    else:
        rows = [_row(g) for g in grid]
    lc, lq = zip(*rows)
    return SieveCostModel(grid, lc, lq)


@lru_cache(maxsize=None)
def _default_model(grid_size: int) -> SieveCostModel:
    return build_model(grid_size)


def default_model(grid_size: int = DEFAULT_GRID_SIZE, cache: str | Path | None = None) -> SieveCostModel:
    """Process-wide model; with ``cache`` the table is read from / written to that CSV."""
    if cache is not None:
        cache = Path(cache)
        if cache.exists():
            return SieveCostModel.load_csv(cache)
        model = _default_model(grid_size)
        cache.parent.mkdir(parents=True, exist_ok=True)
        model.save_csv(cache)
        return model
    return _default_model(grid_size)
