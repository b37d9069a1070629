"""Domain types shared by the closed forms, the asymptotic solvers and the oracle.

Everything here works with exponents only: ``q = n**cq`` and ``sigma = n**cs``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

SQRT2 = math.sqrt(2.0)


class InvalidParams(ValueError):
    """Raised when (cq, cs, scenario) is outside the region the formulas cover."""


class DomainError(ValueError):
    """Raised when an argument falls outside the domain of a scalar function."""


class InfeasibleSchedule(ArithmeticError):
    """A positivity cut (``t*log2(gamma) + cs > 0`` or ``s*ell(s) + cs > 0``) failed."""


class NonFinite(ArithmeticError):
    pass


class Compute(str, enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


class Samples(str, enum.Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class ProblemParams:
    cq: float
    cs: float


@dataclass(frozen=True)
class Scenario:
    compute: Compute = Compute.CLASSICAL
    samples: Samples = Samples.EXPONENTIAL

    def __post_init__(self):
        object.__setattr__(self, "compute", Compute(self.compute))
        object.__setattr__(self, "samples", Samples(self.samples))


REGEV = ProblemParams(cq=2.0, cs=1.5)


@dataclass(frozen=True)
class FixedOne:
    """gamma = 1 in every sieving step (the original coded-BKW with sieving)."""

    @property
    def gamma(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Constant:
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma <= SQRT2:
            raise DomainError(f"constant gamma must lie in (0, sqrt(2)], got {self.gamma}")


@dataclass(frozen=True)
class Arithmetic:
    gamma_s: float
    gamma_f: float

    def __post_init__(self):
        if not 0.0 < self.gamma_s <= self.gamma_f <= SQRT2:
            raise DomainError(
                f"need 0 < gamma_s <= gamma_f <= sqrt(2), got ({self.gamma_s}, {self.gamma_f})"
            )


GammaSchedule = Union[FixedOne, Constant, Arithmetic]


def schedule_endpoints(schedule: GammaSchedule) -> tuple[float, float]:
    """Return ``(gamma_s, gamma_f)``; constant schedules give equal endpoints."""
    if isinstance(schedule, Arithmetic):
        return schedule.gamma_s, schedule.gamma_f
    return schedule.gamma, schedule.gamma


class Algorithm(str, enum.Enum):
    PLAIN_BKW = "plain"
    CODED_BKW = "coded"
    LATTICE = "lattice"
    SIEVE = "sieve"


@dataclass(frozen=True)
class AlgorithmKind:
    """Dispatch tag. ``schedule`` is only meaningful for ``Algorithm.SIEVE``.

    For sieve kinds the numeric fields of the schedule are a template: ``solve``
    optimizes over them and only the variant (FixedOne / Constant / Arithmetic)
    is read.
    """

    algorithm: Algorithm
    schedule: GammaSchedule | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))

    @classmethod
    def sieve(cls, schedule: GammaSchedule) -> "AlgorithmKind":
        return cls(Algorithm.SIEVE, schedule)


@dataclass(frozen=True)
class ExponentResult:
    c: float
    alpha_opt: float = float("nan")
    schedule_opt: GammaSchedule | None = None
    objective_evals: int = 0
    converged: bool = True
    extra: dict = field(default_factory=dict, compare=False)


def alpha_max(params: ProblemParams, scenario: Scenario) -> float:
    """Upper limit of the sieving fraction alpha.

    One extra unit of ``alpha`` is available with exponentially many samples;
    sample amplification from polynomially many samples costs it.
    """
    base = 2.0 * (params.cq - params.cs)
    return base + 1.0 if scenario.samples is Samples.EXPONENTIAL else base


def validate(params: ProblemParams, scenario: Scenario) -> None:
    cq, cs = params.cq, params.cs
    if not (math.isfinite(cq) and math.isfinite(cs)):
        raise InvalidParams(f"cq and cs must be finite, got cq={cq}, cs={cs}")
    if cs <= 0:
        raise InvalidParams(f"cs > 0 violated (cs={cs})")
    if cq <= cs:
        raise InvalidParams(f"cq > cs violated (cq={cq}, cs={cs})")
    amax = alpha_max(params, scenario)
    if amax <= 0:
        raise InvalidParams(f"alpha_max = {amax} must be positive")
