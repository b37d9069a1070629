import pytest
from hypothesis import given, strategies as st

from bkwsieve.core import (Arithmetic, Constant, DomainError, FixedOne, InvalidParams,
                           ProblemParams, Scenario, alpha_max, schedule_endpoints, validate)


def test_regev_accepted():
    validate(ProblemParams(2, 1.5), Scenario("classical", "exponential"))


@pytest.mark.parametrize("samples", ["exponential", "polynomial"])
def test_cq_equal_cs_rejected(samples):
    with pytest.raises(InvalidParams, match="cq > cs"):
        validate(ProblemParams(1.0, 1.0), Scenario("quantum", samples))


def test_degenerate_polynomial_rejected():
    with pytest.raises(InvalidParams):
        validate(ProblemParams(1.2, 1.2), Scenario("classical", "polynomial"))


def test_nonpositive_cs_rejected():
    with pytest.raises(InvalidParams, match="cs > 0"):
        validate(ProblemParams(1.0, 0.0), Scenario())


@pytest.mark.parametrize("cq, cs, samples, expected", [
    (2, 1.5, "exponential", 2.0),
    (2, 1.5, "polynomial", 1.0),
    (3, 1.5, "exponential", 4.0),
])
def test_alpha_max(cq, cs, samples, expected):
    assert alpha_max(ProblemParams(cq, cs), Scenario("classical", samples)) == expected


@given(st.floats(0.01, 10), st.floats(0.001, 5))
def test_polynomial_alpha_max_is_one_less(cs, gap):
    p = ProblemParams(cs + gap, cs)
    exp = alpha_max(p, Scenario(samples="exponential"))
    poly = alpha_max(p, Scenario(samples="polynomial"))
    assert poly == pytest.approx(exp - 1, abs=1e-12)


def test_schedules():
    assert FixedOne().gamma == 1.0
    assert schedule_endpoints(FixedOne()) == schedule_endpoints(Constant(1.0))
    Constant(2 ** 0.5)
    Arithmetic(1.0, 1.0)
    with pytest.raises(DomainError):
        Constant(1.5)
    with pytest.raises(DomainError):
        Arithmetic(1.2, 1.1)
    with pytest.raises(DomainError):
        Constant(0.0)


def test_scenario_coerces_strings():
    sc = Scenario("quantum", "polynomial")
    assert sc.compute.value == "quantum" and sc.samples.value == "polynomial"
    with pytest.raises(ValueError):
        Scenario("analog")
