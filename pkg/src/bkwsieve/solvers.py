"""Asymptotic exponent of coded-BKW with sieving for constant and arithmetic gamma schedules.

Both objectives return ``c`` such that the cost is ``2^{cn + o(n)}``. The
fraction ``alpha`` of sieving steps (``t2 = alpha*log2 n``) is bounded by
``alpha_max``, which already encodes the sample regime, so the first term
``(alpha_max - alpha)/cq`` covers exponential and polynomial samples alike.

Along an arithmetic schedule the integration variable ``s`` runs backwards
from the last sieving step (``s = 0``, ``gamma = gamma_f``) to the first
(``s = alpha``, ``gamma = gamma_s``); ``s*ell(s)`` is the base-2 log of the
product of the reduction factors of the last ``s*log2 n`` steps, per ``log2 n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import closed_forms
from .core import (SQRT2, Algorithm, AlgorithmKind, Arithmetic, Constant,
                   DomainError, ExponentResult, FixedOne, InfeasibleSchedule,
                   NonFinite, ProblemParams, Scenario, alpha_max, validate)
from .numerics import (PENALTY, MinimizerSpec, QuadratureSpec, cumulative,
                       minimize_box)
from .sieve import SieveCostModel

GAMMA_CLAMP = SQRT2 - 1e-6
ELL_EPS = 1e-6
GRID_POINTS = 513
_LN2 = math.log(2.0)


class DegenerateSchedule(ValueError):
    """gamma_s == gamma_f where a strictly increasing schedule is required."""


@dataclass(frozen=True, eq=False)
class ObjectiveContext:
    params: ProblemParams
    scenario: Scenario
    model: SieveCostModel
    quadrature: QuadratureSpec = QuadratureSpec()
    grid_points: int = GRID_POINTS
    alpha_max: float = field(init=False)

    def __post_init__(self):
        validate(self.params, self.scenario)
        object.__setattr__(self, "alpha_max", alpha_max(self.params, self.scenario))

    def lam(self, gamma):
        return self.model.lam(gamma, self.scenario.compute)


def _log1p_ratio(x: float) -> float:
    """log1p(x)/x, continuous at 0."""
    return math.log1p(x) / x if x != 0.0 else 1.0


def _check_alpha(alpha: float, ctx: ObjectiveContext) -> None:
    if not 0.0 <= alpha <= ctx.alpha_max * (1 + 1e-12):
        raise DomainError(f"alpha must lie in [0, {ctx.alpha_max}], got {alpha}")


# -- constant gamma -----------------------------------------------------------

def inner_log_integral_t1(alpha: float, gamma: float, ctx: ObjectiveContext) -> float:
    """Closed form of ``int_0^alpha (log2 g - lam(g)) / (t log2 g + cs) dt``."""
    cs = ctx.params.cs
    L = math.log2(gamma)
    lam = ctx.lam(gamma)
    if alpha * L + cs <= 0:
        raise InfeasibleSchedule(f"alpha*log2(gamma) + cs <= 0 (alpha={alpha}, gamma={gamma})")
    return (L - lam) * alpha / cs * _log1p_ratio(alpha * L / cs)


def objective_t1(alpha: float, gamma: float, ctx: ObjectiveContext) -> float:
    _check_alpha(alpha, ctx)
    if not 0.0 < gamma <= GAMMA_CLAMP:
        raise DomainError(f"gamma must lie in (0, {GAMMA_CLAMP}], got {gamma}")
    cs, cq = ctx.params.cs, ctx.params.cq
    lam = ctx.lam(gamma)
    if not lam > 0:
        raise NonFinite(f"lambda({gamma}) = {lam} is not positive")
    I = inner_log_integral_t1(alpha, gamma, ctx)
    # cs/(alpha*log2 g + cs) * exp(I) == exp(I - log1p(x))
    x = alpha * math.log2(gamma) / cs
    sieve_term = -math.expm1(I - math.log1p(x)) / lam
    denom = (ctx.alpha_max - alpha) / cq + sieve_term
    if not denom > 0 or not math.isfinite(denom):
        raise NonFinite(f"objective denominator {denom} at alpha={alpha}, gamma={gamma}")
    return 1.0 / denom


# -- arithmetic gamma ----------------------------------------------------------

def gamma_of_s(s, alpha: float, gamma_s: float, gamma_f: float):
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > alpha * (1 + 1e-12)):
        raise DomainError(f"s must lie in [0, {alpha}]")
    out = gamma_s + (alpha - s_arr) / alpha * (gamma_f - gamma_s)
    return float(out) if out.ndim == 0 else out


def _ell(s, alpha: float, gamma_s: float, gamma_f: float):
    """Mean of log2 gamma over [0, s]; gamma_s == gamma_f allowed (gives log2 gamma_f)."""
    s = np.asarray(s, dtype=float)
    g = gamma_s + (alpha - s) / alpha * (gamma_f - gamma_s)
    h = gamma_f - g
    # (gf ln gf - g ln g)/h - 1 rewritten through log1p to survive h -> 0
    small = (s < ELL_EPS * alpha) | (h <= 0)
    h_safe = np.where(small, 1.0, h)
    val = (gamma_f * np.log1p(h_safe / g) / h_safe + np.log(g) - 1.0) / _LN2
    out = np.where(small, math.log2(gamma_f), val)
    return float(out) if out.ndim == 0 else out


def ell_of_s(s, alpha: float, gamma_s: float, gamma_f: float):
    if not gamma_f > gamma_s:
        raise DegenerateSchedule("ell(s) needs gamma_f > gamma_s; use the constant-gamma path")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > alpha * (1 + 1e-12)):
        raise DomainError(f"s must lie in [0, {alpha}]")
    return _ell(s, alpha, gamma_s, gamma_f)


class _Integrands:
    """Inner and outer integrands of the arithmetic-schedule objective."""

    def __init__(self, alpha, gamma_s, gamma_f, ctx):
        self.alpha, self.gs, self.gf, self.ctx = alpha, gamma_s, gamma_f, ctx
        self.cs = ctx.params.cs

    def _denominator(self, s):
        den = s * _ell(s, self.alpha, self.gs, self.gf) + self.cs
        if np.any(den <= 0):
            raise InfeasibleSchedule("s*ell(s) + cs <= 0 somewhere on [0, alpha]")
        return den

    def inner(self, s):
        g = self.gs + (self.alpha - s) / self.alpha * (self.gf - self.gs)
        return (np.log2(g) - self.ctx.lam(g)) / self._denominator(s)

    def outer(self, I):
        def f(t):
            den = self._denominator(t)
            return self.cs / den**2 * np.exp(I(t))
        return f


@lru_cache(maxsize=64)
def _inner_cumulative(alpha, gamma_s, gamma_f, ctx):
    return cumulative(_Integrands(alpha, gamma_s, gamma_f, ctx).inner, alpha,
                      ctx.grid_points, ctx.quadrature)


def _check_schedule(gamma_s, gamma_f):
    if not 0.0 < gamma_s <= gamma_f <= SQRT2 * (1 + 1e-15):
        raise DomainError(f"need 0 < gamma_s <= gamma_f <= sqrt(2), got ({gamma_s}, {gamma_f})")


def inner_log_integral_t2(t: float, alpha: float, gamma_s: float, gamma_f: float,
                          ctx: ObjectiveContext) -> float:
    _check_schedule(gamma_s, gamma_f)
    if not 0.0 <= t <= alpha * (1 + 1e-12):
        raise DomainError(f"t must lie in [0, alpha={alpha}], got {t}")
    if t == 0.0:
        return 0.0
    if gamma_s == gamma_f:
        return inner_log_integral_t1(t, gamma_s, ctx)
    return _inner_cumulative(alpha, gamma_s, gamma_f, ctx)(t)


def objective_t2(alpha: float, gamma_s: float, gamma_f: float, ctx: ObjectiveContext,
                 force_integral: bool = False) -> float:
    """Objective for the arithmetic schedule.

    Equal endpoints are routed to :func:`objective_t1` unless ``force_integral``
    asks for the double-integral form (used to check the two forms agree).
    """
    _check_alpha(alpha, ctx)
    _check_schedule(gamma_s, gamma_f)
    cq = ctx.params.cq
    if alpha == 0.0:
        return 1.0 / (ctx.alpha_max / cq)
    if gamma_s == gamma_f and gamma_f <= GAMMA_CLAMP and not force_integral:
        return objective_t1(alpha, gamma_s, ctx)
    terms = _Integrands(alpha, gamma_s, gamma_f, ctx)
    I = _inner_cumulative(alpha, gamma_s, gamma_f, ctx)
    outer = cumulative(terms.outer(I), alpha, ctx.grid_points, ctx.quadrature).total
    denom = (ctx.alpha_max - alpha) / cq + outer
    if not denom > 0 or not math.isfinite(denom):
        raise NonFinite(f"objective denominator {denom}")
    return 1.0 / denom


# -- optimization --------------------------------------------------------------

def _guarded(fn):
    def wrapped(x):
        try:
            return fn(x)
        except (InfeasibleSchedule, NonFinite, DomainError, ArithmeticError):
            return PENALTY
    return wrapped


def _solve_fixed_one(ctx, spec):
    f = _guarded(lambda x: objective_t1(x[0], 1.0, ctx))
    x, val, info = minimize_box(f, [0.0], [ctx.alpha_max], spec)
    return ExponentResult(val, float(x[0]), FixedOne(), info["evals"], info["converged"])


def _solve_constant(ctx, spec, gamma_lo, warm=None):
    f = _guarded(lambda x: objective_t1(x[0], x[1], ctx))
    warm = warm or _solve_fixed_one(ctx, spec)
    starts = [(warm.alpha_opt, 1.0)] if gamma_lo <= 1.0 else []
    x, val, info = minimize_box(f, [0.0, gamma_lo], [ctx.alpha_max, GAMMA_CLAMP], spec, starts)
    if starts and warm.c < val:
        val, x = warm.c, np.array([warm.alpha_opt, 1.0])
    return ExponentResult(val, float(x[0]), Constant(float(x[1])),
                          info["evals"] + warm.objective_evals, info["converged"])


def _solve_arithmetic(ctx, spec, gamma_lo, warm=None):
    # gamma_f = gamma_s + u*(sqrt2 - gamma_s), u in [0, 1], keeps gamma_s <= gamma_f <= sqrt2
    def unpack(x):
        gs = float(x[1])
        return float(x[0]), gs, min(gs + float(x[2]) * (SQRT2 - gs), SQRT2)

    f = _guarded(lambda x: objective_t2(*unpack(x), ctx))
    warm = warm or _solve_constant(ctx, spec, gamma_lo)
    gs0 = warm.schedule_opt.gamma
    x, val, info = minimize_box(f, [0.0, gamma_lo, 0.0], [ctx.alpha_max, SQRT2, 1.0], spec,
                                [(warm.alpha_opt, gs0, 0.0)])
    if warm.c < val:
        val, x = warm.c, np.array([warm.alpha_opt, gs0, 0.0])
    alpha, gs, gf = unpack(x)
    return ExponentResult(val, alpha, Arithmetic(gs, gf),
                          info["evals"] + warm.objective_evals, info["converged"])


def solve(params: ProblemParams, scenario: Scenario, kind: AlgorithmKind,
          model: SieveCostModel, quadrature: QuadratureSpec | None = None,
          minimizer: MinimizerSpec | None = None, gamma_min: float | None = None,
          warm: ExponentResult | None = None) -> ExponentResult:
    """Optimal exponent for ``kind`` at ``(params, scenario)``.

    ``gamma_min`` raises the lower end of the gamma search box (default: the
    bottom of the lambda table). ``warm`` is the result for the next coarser
    schedule (FixedOne for Constant, Constant for Arithmetic); it is recomputed
    when omitted and guarantees richer schedules never report a worse value.
    """
    validate(params, scenario)
    if kind.algorithm is Algorithm.PLAIN_BKW:
        return ExponentResult(closed_forms.plain_bkw_exponent(params, scenario.samples), 0.0)
    if kind.algorithm is Algorithm.CODED_BKW:
        return ExponentResult(closed_forms.coded_bkw_exponent(params))
    if kind.algorithm is Algorithm.LATTICE:
        return ExponentResult(closed_forms.lattice_exponent(params, scenario, model))

    ctx = ObjectiveContext(params, scenario, model, quadrature or QuadratureSpec())
    spec = minimizer or MinimizerSpec()
    gamma_lo = max(model.gamma_lo, gamma_min or 0.0)
    if gamma_lo >= GAMMA_CLAMP:
        raise DomainError(f"gamma_min={gamma_min} leaves no room below sqrt(2)")
    schedule = kind.schedule
    if isinstance(schedule, FixedOne) or schedule is None:
        return _solve_fixed_one(ctx, spec)
    if isinstance(schedule, Constant):
        return _solve_constant(ctx, spec, gamma_lo, warm)
    if isinstance(schedule, Arithmetic):
        return _solve_arithmetic(ctx, spec, gamma_lo, warm)
    raise TypeError(f"unknown gamma schedule {schedule!r}")


def solve_all_schedules(params: ProblemParams, scenario: Scenario, model: SieveCostModel,
                        **kwargs) -> dict[str, ExponentResult]:
    """FixedOne, Constant and Arithmetic results, each warm-starting the next."""
    fixed = solve(params, scenario, AlgorithmKind.sieve(FixedOne()), model, **kwargs)
    const = solve(params, scenario, AlgorithmKind.sieve(Constant(1.0)), model, warm=fixed, **kwargs)
    arith = solve(params, scenario, AlgorithmKind.sieve(Arithmetic(1.0, 1.0)), model, warm=const,
                  **kwargs)
    return {"gamma=1": fixed, "constant": const, "arithmetic": arith}
