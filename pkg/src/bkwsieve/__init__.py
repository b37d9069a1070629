"""Asymptotic complexity exponents of BKW-type LWE solvers, with coded-BKW
with sieving under constant and arithmetically increasing reduction factors."""
from .core import (REGEV, Algorithm, AlgorithmKind, Arithmetic, Compute, Constant,
                   ExponentResult, FixedOne, InvalidParams, ProblemParams, Samples,
                   Scenario, alpha_max, validate)
from .sieve import SieveCostModel, build_model, default_model, lambda_at
from .solvers import objective_t1, objective_t2, solve, solve_all_schedules

__version__ = "0.1.0"
