import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkwsieve.core import REGEV, ProblemParams, Scenario
from bkwsieve.discrete import (BisectionFailure, NonPositiveStep, arithmetic_gammas,
                               build_schedule, log2_suffix_products_gamma,
                               n_expression, solve_c_discrete, step_counts)

SC = Scenario("classical", "exponential")


def _linear_solve(sched, c):
    """Step equations as one lower-triangular system: (star_i + lam_i) n_i + lam_i sum_{j<i} n_j = c."""
    t2 = sched.t2
    A = np.tril(np.repeat(sched.lambdas[:, None], t2, axis=1), -1)
    A[np.diag_indices(t2)] = sched.stars + sched.lambdas
    return np.linalg.solve(A, np.full(t2, c))


def test_arithmetic_gammas():
    g = arithmetic_gammas(5, 0.6, 1.0)
    assert g[0] == 0.6 and g[-1] == 1.0
    assert np.allclose(np.diff(g), 0.1, atol=1e-15)
    assert arithmetic_gammas(0, 0.6, 1.0).size == 0


def test_step_counts():
    assert step_counts(1.5, 2.0, 64) == (96, 32.0)
    t2, t1 = step_counts(0.0, 2.0, 100.5)
    assert t2 == 0 and t1 == 201.0


@pytest.mark.parametrize("alpha,gs,gf", [(1.0, 1.0, 1.0), (1.47, 0.55, 0.98), (0.8, 1.1, 1.3)])
@pytest.mark.parametrize("method", ["recursion", "direct"])
def test_schedule_matches_linear_solve(model, alpha, gs, gf, method):
    s = build_schedule(0.9, alpha, gs, gf, REGEV, SC, model, 64, method)
    assert np.allclose(s.step_sizes, _linear_solve(s, 0.9), rtol=1e-10, atol=0)
    assert s.N == pytest.approx(np.sum(s.step_sizes), rel=1e-15)


def test_constant_gamma_one_closed_recursion(model):
    s = build_schedule(0.9, 1.0, 1.0, 1.0, REGEV, SC, model, 128)
    lam = s.lambdas[0]
    assert np.all(s.lambdas == lam)
    ratio = s.step_sizes[1:] / s.step_sizes[:-1]
    assert np.allclose(ratio, s.stars[:-1] / (s.stars[1:] + lam), rtol=1e-12)


def test_two_step_case(model):
    log2n = 64
    s = build_schedule(0.9, 2 / log2n, 1.0, 1.2, REGEV, SC, model, log2n)
    assert s.t2 == 2
    assert np.allclose(s.step_sizes, _linear_solve(s, 0.9), rtol=1e-12)


def test_empty_schedule(model):
    s = build_schedule(0.9, 0.0, 1.0, 1.0, REGEV, SC, model, 64)
    assert s.t2 == 0 and s.N == 0.0 and s.step_sizes.size == 0
    assert n_expression(s, 0.9) == 0.0


def test_suffix_sums_telescope(model):
    s = build_schedule(0.9, 1.2, 0.6, 1.3, REGEV, SC, model, 100)
    assert np.allclose(s.stars[:-1] - s.stars[1:], np.log2(s.gammas[:-1]), atol=1e-12)
    assert s.stars[-1] == pytest.approx(math.log2(1.3) + 1.5 * 100, abs=1e-12)


@pytest.mark.parametrize("log2n", [64, 256])
def test_gamma_function_products(model, log2n):
    s = build_schedule(0.9, 1.2, 0.6, 1.3, REGEV, SC, model, log2n)
    via_gamma = log2_suffix_products_gamma(s.t2, 0.6, 1.3)
    suffix = s.stars - 1.5 * log2n
    assert np.allclose(via_gamma, suffix, rtol=1e-6, atol=1e-9)


def test_gamma_function_products_degenerate():
    with pytest.raises(ValueError):
        log2_suffix_products_gamma(10, 1.0, 1.0)


def test_methods_agree_on_random_schedules(model):
    rng = np.random.default_rng(7)
    for _ in range(10):
        gs = rng.uniform(0.5, 1.3)
        gf = rng.uniform(gs, 1.4)
        alpha = rng.uniform(0.1, 2.0)
        a = build_schedule(0.9, alpha, gs, gf, REGEV, SC, model, 96, "recursion")
        b = build_schedule(0.9, alpha, gs, gf, REGEV, SC, model, 96, "direct")
        assert np.allclose(a.step_sizes, b.step_sizes, rtol=1e-10, atol=0)


def test_unknown_method(model):
    with pytest.raises(ValueError):
        build_schedule(0.9, 1.0, 1.0, 1.0, REGEV, SC, model, 64, "magic")


def test_nonpositive_step(model):
    with pytest.raises(NonPositiveStep):
        build_schedule(0.9, 1.0, 0.3, 0.3, ProblemParams(2.0, 0.6), SC, model, 64)


# -- solve_c_discrete ------------------------------------------------------------

def test_alpha_zero_is_plain(model):
    for log2n in (32, 100.0, 512):
        r = solve_c_discrete(0.0, 1.0, 1.0, REGEV, SC, model, log2n)
        assert r.c_discrete == pytest.approx(1.0, abs=1e-14)
    poly = solve_c_discrete(0.0, 1.0, 1.0, REGEV, Scenario("classical", "polynomial"), model, 64)
    assert poly.c_discrete == pytest.approx(2.0, abs=1e-14)


def test_residual_and_n_expression(model):
    r = solve_c_discrete(1.47, 0.55, 0.98, REGEV, SC, model, 128)
    assert r.residual <= 1e-12
    s = r.schedule
    assert n_expression(s, r.c_discrete) == pytest.approx(s.N, rel=1e-8)
    assert s.b == pytest.approx(r.c_discrete / (REGEV.cq * 128), rel=1e-15)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 1.8), st.floats(0.6, 1.3), st.floats(0, 1))
def test_residual_small_everywhere(model, alpha, gs, u):
    gf = gs + u * (1.41 - gs)
    r = solve_c_discrete(alpha, gs, gf, REGEV, SC, model, 64)
    assert r.residual <= 1e-12
    assert np.all(r.schedule.step_sizes > 0)


def test_converges_to_asymptotic(regev_results, model):
    r = regev_results["classical", "exponential"]
    for res in (r["constant"], r["arithmetic"]):
        gs, gf = (res.schedule_opt.gamma,) * 2 if hasattr(res.schedule_opt, "gamma") else \
            (res.schedule_opt.gamma_s, res.schedule_opt.gamma_f)
        gaps = [abs(solve_c_discrete(res.alpha_opt, gs, gf, REGEV, SC, model, n).c_discrete - res.c)
                for n in (64, 128, 256)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] / res.c <= 0.02


def test_bisection_failure(model):
    with pytest.raises(BisectionFailure):
        solve_c_discrete(1.0, 1.0, 1.0, REGEV, SC, model, 64, bracket=(0.01, 0.02))


def test_small_n_rejected(model):
    with pytest.raises(ValueError):
        solve_c_discrete(1.0, 1.0, 1.0, REGEV, SC, model, 16)
