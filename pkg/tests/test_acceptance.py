"""Acceptance criteria 1-8. Each test records one PASS/FAIL line shown in the terminal summary."""
import io
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from bkwsieve import cli
from bkwsieve.closed_forms import plain_bkw_exponent
from bkwsieve.core import REGEV, SQRT2, ProblemParams, Scenario
from bkwsieve.discrete import solve_c_discrete
from bkwsieve.numerics import integrate
from bkwsieve.solvers import (ObjectiveContext, inner_log_integral_t1, objective_t1,
                              objective_t2, solve_all_schedules)

# reference exponents at cq=2, cs=1.5: (gamma=1, constant, arithmetic)
REFERENCE = {
    ("classical", "exponential"): (0.8951, 0.8927, 0.8917),
    ("quantum", "exponential"): (0.8856, 0.8795, 0.8782),
    ("classical", "polynomial"): (1.6507, 1.6417, 1.6399),
    ("quantum", "polynomial"): (1.6364, 1.6211, 1.6168),
}
KEYS = ("gamma=1", "constant", "arithmetic")


def test_criterion_1_regev_exponents(regev_results, report):
    misses, worst = [], 0.0
    for sc, expected in REFERENCE.items():
        for key, want in zip(KEYS, expected):
            got = regev_results[sc][key].c
            worst = max(worst, abs(got - want))
            if abs(got - want) > 1e-3:
                misses.append(f"{'/'.join(sc)} {key}: {got:.5f} vs {want}")
    detail = (f"12 reference exponents within 1e-3 (max deviation {worst:.2e})" if not misses
              else f"{12 - len(misses)}/12 within 1e-3; off: " + "; ".join(misses))
    report(1, not misses, detail)
    assert not misses, detail


def test_criterion_2_lambda_calibration(model, report):
    l1c, l1q = model.lam(1.0, "classical"), model.lam(1.0, "quantum")
    l_top = model.lam(SQRT2, "classical"), model.lam(SQRT2, "quantum")
    grid = np.linspace(model.gamma_lo, SQRT2, 1024)
    violations = sum(int(np.sum(np.diff(model.lam(grid, c)) > 0)) for c in ("classical", "quantum"))
    ok = (abs(l1c - 0.292) <= 1e-3 and abs(l1q - 0.265) <= 1e-3
          and max(abs(v) for v in l_top) <= 1e-4 and violations == 0)
    report(2, ok, f"lambda(1) = {l1c:.5f} / {l1q:.5f}, lambda(sqrt2) = {max(l_top):.1e}, "
                  f"{violations} monotonicity violations on 1024 points")
    assert ok


def _probe_ctx_pairs(model):
    rng = np.random.default_rng(20240601)
    out = []
    scenarios = [Scenario(c, s) for c in ("classical", "quantum") for s in ("exponential", "polynomial")]
    while len(out) < 20:
        sc = scenarios[len(out) % 4]
        ctx = ObjectiveContext(REGEV, sc, model)
        alpha = rng.uniform(0.05, ctx.alpha_max)
        gamma = rng.uniform(0.5, 1.4)
        try:
            objective_t1(alpha, gamma, ctx)
        except ArithmeticError:
            continue
        out.append((ctx, alpha, gamma))
    return out


def test_criterion_3_degeneration_identity(model, report):
    worst = 0.0
    for ctx, alpha, gamma in _probe_ctx_pairs(model):
        a = objective_t2(alpha, gamma, gamma, ctx, force_integral=True)
        worst = max(worst, abs(a - objective_t1(alpha, gamma, ctx)))
    report(3, worst <= 1e-6, f"max |t2(a,g,g) - t1(a,g)| = {worst:.2e} on 20 probes (tol 1e-6)")
    assert worst <= 1e-6


def test_criterion_4_alpha_zero(model, report):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(10):
        cq = rng.uniform(1.0, 4.0)
        cs = rng.uniform(0.1, cq - 0.05)
        params = ProblemParams(cq, cs)
        for samples in ("exponential", "polynomial"):
            ctx = ObjectiveContext(params, Scenario("classical", samples), model)
            want = cq / (2 * (cq - cs) + (1 if samples == "exponential" else 0))
            assert plain_bkw_exponent(params, samples) == pytest.approx(want, rel=1e-15)
            for gamma in (0.7, 1.0, 1.3):
                worst = max(worst, abs(objective_t1(0.0, gamma, ctx) - want))
    report(4, worst <= 1e-12, f"max |t1(0) - plain BKW| = {worst:.1e} on 10 pairs x 2 regimes")
    assert worst <= 1e-12


def test_criterion_5_closed_form_quadrature(model, report):
    ctx = ObjectiveContext(REGEV, Scenario(), model)
    cs = ctx.params.cs
    worst = 0.0
    for gamma in (0.9, 1.0, 1.1, 1.3):
        L, lam = math.log2(gamma), ctx.lam(gamma)
        for alpha in np.linspace(0.4, ctx.alpha_max, 5):
            quad = integrate(lambda t: (L - lam) / (t * L + cs), 0.0, float(alpha))
            worst = max(worst, abs(inner_log_integral_t1(float(alpha), gamma, ctx) - quad))
    report(5, worst <= 1e-9, f"max |closed form - quadrature| = {worst:.1e} on 20 probes (tol 1e-9)")
    assert worst <= 1e-9


@pytest.mark.slow
def test_criterion_6_ordering(model, report):
    bad, n, min_imp = [], 0, math.inf
    for cq in np.linspace(1.2, 3.0, 9):
        for cs in np.linspace(0.55, cq - 0.1, 9):
            r = solve_all_schedules(ProblemParams(float(cq), float(cs)), Scenario(), model)
            g1, const, arith = (r[k].c for k in KEYS)
            n += 1
            min_imp = min(min_imp, const - arith)
            if not (arith <= const + 1e-6 <= g1 + 2e-6 and const - arith >= -1e-6):
                bad.append(f"({cq:.3f}, {cs:.3f})")
    ok = not bad
    report(6, ok, f"{n - len(bad)}/{n} grid points ordered, min improvement {min_imp:.2e}"
                  + ("" if ok else "; violations at " + ", ".join(bad)))
    assert ok


def test_criterion_7_discrete_oracle(regev_results, model, report):
    r = regev_results["classical", "exponential"]
    sc = Scenario()
    details, ok = [], True
    for key, target in (("constant", 0.8927), ("arithmetic", 0.8917)):
        res = r[key]
        sched = res.schedule_opt
        gs, gf = (sched.gamma_s, sched.gamma_f) if key == "arithmetic" else (sched.gamma,) * 2
        c = {n: solve_c_discrete(res.alpha_opt, gs, gf, REGEV, sc, model, n).c_discrete
             for n in (64, 256)}
        rel = abs(c[256] - target) / target
        shrinks = abs(c[256] - res.c) < abs(c[64] - res.c)
        ok &= rel <= 0.02 and shrinks
        details.append(f"{key}: c(256) = {c[256]:.5f}, rel {rel:.2e}, gap 64->256 "
                       f"{abs(c[64] - res.c):.1e}->{abs(c[256] - res.c):.1e}")
    report(7, ok, "; ".join(details))
    assert ok


def _cli_output(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(list(argv))
    assert code == 0
    return buf.getvalue()


@pytest.mark.slow
def test_criterion_8_determinism(report):
    t1 = [_cli_output("table1") for _ in range(2)]
    sweep = ("sweep", "--cq-min", "1.8", "--cq-max", "2.4", "--cq-steps", "2",
             "--cs-min", "0.8", "--cs-max", "1.9", "--cs-steps", "3")
    sw = [_cli_output(*sweep) for _ in range(2)]
    ok = t1[0] == t1[1] and sw[0] == sw[1]
    report(8, ok, f"table1 ({len(t1[0])} bytes) and sweep ({len(sw[0])} bytes) identical across two runs")
    assert ok
