"""Closed-form exponents: plain BKW, coded-BKW, lattice sieving attacks, Arora-Ge regime."""
from __future__ import annotations

import enum
import math

from .core import DomainError, InvalidParams, ProblemParams, Samples, Scenario
from .sieve import SieveCostModel


class RegimeLabel(str, enum.Enum):
    POLYNOMIAL = "polynomial"
    SUPEREXPONENTIAL = "superexponential"
    BOUNDARY_UNSPECIFIED = "boundary_unspecified"


def plain_bkw_exponent(params: ProblemParams, samples: Samples | str = Samples.EXPONENTIAL) -> float:
    samples = Samples(samples)
    denom = 2.0 * (params.cq - params.cs) + (1.0 if samples is Samples.EXPONENTIAL else 0.0)
    if denom <= 0:
        raise InvalidParams(f"plain BKW denominator {denom} is not positive")
    return params.cq / denom


def coded_bkw_exponent(params: ProblemParams) -> float:
    """Same expression for exponential and polynomial sample regimes."""
    if params.cq <= params.cs or params.cs <= 0:
        raise InvalidParams(f"coded BKW needs cq > cs > 0 (cq={params.cq}, cs={params.cs})")
    return 1.0 / (1.0 / params.cq + 2.0 * math.log(params.cq / params.cs))


def lattice_exponent(params: ProblemParams, scenario: Scenario, model: SieveCostModel) -> float:
    """``2*lambda*cq / (cq - cs + 1/2)^2``, the ``+1/2`` dropped for polynomial samples."""
    gap = params.cq - params.cs
    if scenario.samples is Samples.EXPONENTIAL:
        gap += 0.5
    if gap == 0:
        raise InvalidParams("lattice exponent denominator vanishes")
    lam = model.lam(1.0, scenario.compute)
    return 2.0 * lam * params.cq / gap**2


def arora_ge_regime(cs: float) -> RegimeLabel:
    if not cs > 0:
        raise DomainError(f"cs must be positive, got {cs}")
    if cs < 0.5:
        return RegimeLabel.POLYNOMIAL
    if cs > 0.5:
        return RegimeLabel.SUPEREXPONENTIAL
    return RegimeLabel.BOUNDARY_UNSPECIFIED

