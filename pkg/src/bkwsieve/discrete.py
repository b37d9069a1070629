"""Finite-n check of the asymptotic objectives through the step-size recursion.

For a concrete ``n = 2**log2n`` the sieving steps are laid out explicitly:
step ``i`` has reduction factor ``gamma_i`` and length ``n_i`` fixed by

    (log2 prod_{j>=i} gamma_j + cs*log2 n) * n_i = c*n - lambda_i * sum_{j<=i} n_j

and ``c`` is chosen so that the plain and sieving steps together cover all
``n`` positions. All lengths are kept as fractions of ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import ProblemParams, Scenario, alpha_max, validate
from .sieve import SieveCostModel


class NonPositiveStep(ArithmeticError):
    pass


class BisectionFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class DiscreteSchedule:
    log2n: float
    t1: float
    t2: int
    b: float
    gammas: np.ndarray
    lambdas: np.ndarray
    step_sizes: np.ndarray
    N: float
    stars: np.ndarray

    @property
    def plain_total(self) -> float:
        return self.t1 * self.b


@dataclass(frozen=True)
class OracleResult:
    c_discrete: float
    residual: float
    bisection_iters: int
    schedule: DiscreteSchedule


def arithmetic_gammas(t2: int, gamma_s: float, gamma_f: float) -> np.ndarray:
    if t2 == 0:
        return np.empty(0)
    if t2 == 1:
        return np.array([gamma_f])
    i = np.arange(1, t2 + 1)
    return gamma_s + (gamma_f - gamma_s) * (i - 1) / (t2 - 1)


def step_counts(alpha: float, amax: float, log2n: float) -> tuple[int, float]:
    """``t2 = round(alpha*log2n)``; plain steps take the rest of ``amax*log2n``."""
    t2 = int(round(alpha * log2n))
    return t2, amax * log2n - t2


def build_schedule(c: float, alpha: float, gamma_s: float, gamma_f: float,
                   params: ProblemParams, scenario: Scenario, model: SieveCostModel,
                   log2n: float, method: str = "recursion") -> DiscreteSchedule:
    """Lay out the sieving steps for exponent ``c``.

    ``method="recursion"`` uses the two-step relation between consecutive
    lengths; ``method="direct"`` solves each step equation by forward
    substitution. Both must agree; the second is the check on the first.
    """
    amax = alpha_max(params, scenario)
    t2, t1 = step_counts(alpha, amax, log2n)
    cs = params.cs
    gammas = arithmetic_gammas(t2, gamma_s, gamma_f)
    lambdas = np.asarray(model.lam(gammas, scenario.compute), dtype=float) if t2 else np.empty(0)
    # stars[i] = log2 prod_{j >= i} gamma_j + cs*log2n, via a suffix sum
    suffix = np.cumsum(np.log2(gammas)[::-1])[::-1] if t2 else np.empty(0)
    stars = suffix + cs * log2n
    sizes = np.empty(t2)
    if t2:
        sizes[0] = c / (stars[0] + lambdas[0])
    if method == "recursion":
        for i in range(1, t2):
            lp, li = lambdas[i - 1], lambdas[i]
            sizes[i] = (li * stars[i - 1] * sizes[i - 1] + c * (lp - li)) / (lp * (stars[i] + li))
    elif method == "direct":
        total = sizes[0] if t2 else 0.0
        for i in range(1, t2):
            sizes[i] = (c - lambdas[i] * total) / (stars[i] + lambdas[i])
            total += sizes[i]
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.any(sizes <= 0):
        i = int(np.argmax(sizes <= 0))
        raise NonPositiveStep(f"step {i + 1} of {t2} has non-positive length {sizes[i]:.3g}")
    b = c / (params.cq * log2n)
    return DiscreteSchedule(log2n, t1, t2, b, gammas, lambdas, sizes, float(np.sum(sizes)), stars)


def log2_suffix_products_gamma(t2: int, gamma_s: float, gamma_f: float) -> np.ndarray:
    """``log2 prod_{k=j}^{t2} gamma_k`` for each j through log-gamma functions.

    With ``d = (gamma_f - gamma_s)/(t2 - 1)`` the product is
    ``d^{t2-j+1} * Gamma(gamma_j/d + t2 - j + 1) / Gamma(gamma_j/d)``.
    Only defined for strictly increasing schedules.
    """
    if t2 < 2 or not gamma_f > gamma_s:
        raise ValueError("needs t2 >= 2 and gamma_f > gamma_s")
    d = (gamma_f - gamma_s) / (t2 - 1)
    gammas = arithmetic_gammas(t2, gamma_s, gamma_f)
    out = np.empty(t2)
    for idx, g in enumerate(gammas):
        m = t2 - idx  # number of factors
        z = g / d
        out[idx] = (m * math.log(d) + math.lgamma(z + m) - math.lgamma(z)) / math.log(2.0)
    return out


def n_expression(schedule: DiscreteSchedule, c: float) -> float:
    """Total sieving length from the last step equation alone."""
    if schedule.t2 == 0:
        return 0.0
    return (c - schedule.stars[-1] * schedule.step_sizes[-1]) / schedule.lambdas[-1]


def solve_c_discrete(alpha: float, gamma_s: float, gamma_f: float, params: ProblemParams,
                     scenario: Scenario, model: SieveCostModel, log2n: float,
                     bracket: tuple[float, float] = (0.01, 10.0), maxiter: int = 200) -> OracleResult:
    """Bisect on ``c`` until the steps cover exactly ``n`` positions."""
    validate(params, scenario)
    if log2n < 32:
        raise ValueError("log2n must be at least 32")

    def residual(c):
        s = build_schedule(c, alpha, gamma_s, gamma_f, params, scenario, model, log2n)
        return s.N + s.plain_total - 1.0

    lo, hi = bracket
    r_lo, r_hi = residual(lo), residual(hi)
    if r_lo * r_hi > 0:
        raise BisectionFailure(f"no sign change of the residual on ({lo}, {hi})")
    c, info = bisect(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                     maxiter=maxiter, full_output=True, disp=False)
    if not info.converged:
        raise BisectionFailure(f"bisection did not converge in {maxiter} iterations")
    sched = build_schedule(c, alpha, gamma_s, gamma_f, params, scenario, model, log2n)
    res = abs(sched.N + sched.plain_total - 1.0)
    if sched.t2 and abs(n_expression(sched, c) - sched.N) > 1e-8 * sched.N:
        raise ArithmeticError("total sieving length disagrees with the last step equation")
    return OracleResult(float(c), float(res), int(info.iterations), sched)
