"""Command-line front end.

    bkwsieve exponent --cq 2 --cs 1.5 --alg sieve-arith
    bkwsieve lambda --gamma 1 --compute quantum
    bkwsieve table1
    bkwsieve sweep --out sweep.csv --cq-steps 9 --cs-steps 9 --workers 8
    bkwsieve oracle --alg sieve-const --log2n 256

Any flag can also come from ``--config FILE`` holding ``key = value`` lines
(``cq = 2``, ``cs-steps = 9``); flags on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import discrete, solvers
from .core import (Algorithm, AlgorithmKind, Arithmetic, Compute, Constant,
                   DomainError, FixedOne, InvalidParams, ProblemParams, Samples,
                   Scenario, schedule_endpoints, validate)
from .numerics import NoFeasiblePoint
from .sieve import lambda_at, default_model

log = logging.getLogger("bkwsieve")

ALGORITHMS = {
    "plain": AlgorithmKind(Algorithm.PLAIN_BKW),
    "coded": AlgorithmKind(Algorithm.CODED_BKW),
    "lattice": AlgorithmKind(Algorithm.LATTICE),
    "sieve-g1": AlgorithmKind.sieve(FixedOne()),
    "sieve-const": AlgorithmKind.sieve(Constant(1.0)),
    "sieve-arith": AlgorithmKind.sieve(Arithmetic(1.0, 1.0)),
}
SIEVE_ALGS = ("sieve-g1", "sieve-const", "sieve-arith")
# the schedule each sieve kind warm-starts from
WARM_FROM = {"sieve-const": "sieve-g1", "sieve-arith": "sieve-const"}
CSV_FIELDS = ["cq", "cs", "compute", "samples", "algorithm", "exponent", "alpha",
              "gamma_s", "gamma_f", "status"]
EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.6f}"


class UsageError(Exception):
    pass


# -- config --------------------------------------------------------------------

def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


# -- shared solving ------------------------------------------------------------

def _model(args):
    return default_model(cache=getattr(args, "lambda_cache", None))


def solve_point(params, scenario, alg, model, gamma_min=None, warm=None):
    return solvers.solve(params, scenario, ALGORITHMS[alg], model, gamma_min=gamma_min, warm=warm)


def result_row(params, scenario, alg, res, status="ok") -> dict:
    row = {"cq": params.cq, "cs": params.cs, "compute": scenario.compute.value,
           "samples": scenario.samples.value, "algorithm": alg, "exponent": None,
           "alpha": None, "gamma_s": None, "gamma_f": None, "status": status}
    if res is not None:
        row["exponent"] = res.c
        if alg in SIEVE_ALGS or alg == "plain":
            row["alpha"] = res.alpha_opt
        if res.schedule_opt is not None:
            row["gamma_s"], row["gamma_f"] = schedule_endpoints(res.schedule_opt)
    return row


def format_row(row: dict) -> dict:
    return {k: fmt(v) if isinstance(v, float) or v is None else v for k, v in row.items()}


# -- subcommands ---------------------------------------------------------------

def cmd_exponent(args) -> int:
    params = ProblemParams(args.cq, args.cs)
    scenario = Scenario(args.compute, args.samples)
    try:
        validate(params, scenario)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc
    res = solve_point(params, scenario, args.alg, _model(args), args.gamma_min)
    row = format_row(result_row(params, scenario, args.alg, res))
    if args.json:
        print(json.dumps(row, sort_keys=False))
        return EXIT_OK
    print(f"c = {row['exponent']}")
    for key in ("alpha", "gamma_s", "gamma_f"):
        if row[key]:
            print(f"{key} = {row[key]}")
    return EXIT_OK


def cmd_lambda(args) -> int:
    try:
        value = lambda_at(args.gamma, args.compute)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    print(fmt(value))
    return EXIT_OK


def table1_values(model, constant_gamma_min=None, params=ProblemParams(2.0, 1.5)):
    """``{(samples, compute): {"gamma=1": c, "constant": c, "arithmetic": c}}``."""
    out = {}
    for samples in Samples:
        for compute in Compute:
            sc = Scenario(compute, samples)
            fixed = solve_point(params, sc, "sieve-g1", model)
            const = solve_point(params, sc, "sieve-const", model, constant_gamma_min, warm=fixed)
            arith = solve_point(params, sc, "sieve-arith", model, warm=const if constant_gamma_min is None else None)
            out[samples, compute] = {"gamma=1": fixed, "constant": const, "arithmetic": arith}
    return out


def render_table1(values) -> str:
    lines = ["| Samples | Schedule | Classical | Quantum |", "|---|---|---|---|"]
    labels = {"gamma=1": "gamma = 1", "constant": "gamma constant",
              "arithmetic": "gamma arithmetic"}
    for samples in Samples:
        for key, label in labels.items():
            cl = values[samples, Compute.CLASSICAL][key].c
            qu = values[samples, Compute.QUANTUM][key].c
            lines.append(f"| {samples.value} | {label} | {fmt(cl)} | {fmt(qu)} |")
    return "\n".join(lines) + "\n"


def cmd_table1(args) -> int:
    values = table1_values(_model(args), args.constant_gamma_min)
    sys.stdout.write(render_table1(values))
    return EXIT_OK


@dataclass(frozen=True)
class SweepGrid:
    cq_min: float = 1.0
    cq_max: float = 3.0
    cq_steps: int = 41
    cs_min: float = 0.55
    cs_max: float = 2.95
    cs_steps: int = 41
    scenario: Scenario = Scenario()
    algorithms: tuple[str, ...] = ("sieve-const", "sieve-arith")

    def __post_init__(self):
        if self.cq_steps < 2 or self.cs_steps < 2:
            raise UsageError("sweep needs at least 2 steps per axis")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {alg!r}")

    def points(self):
        for cq in np.linspace(self.cq_min, self.cq_max, self.cq_steps):
            for cs in np.linspace(self.cs_min, self.cs_max, self.cs_steps):
                yield float(cq), float(cs)


def _sweep_point(job):
    cq, cs, grid, cache = job
    params, sc = ProblemParams(cq, cs), grid.scenario
    try:
        validate(params, sc)
    except InvalidParams:
        return [result_row(params, sc, alg, None, "skipped") for alg in grid.algorithms]
    model = default_model(cache=cache)
    rows, done = [], {}
    for alg in grid.algorithms:
        warm = done.get(WARM_FROM.get(alg))
        try:
            res = solve_point(params, sc, alg, model, warm=warm)
        except (NoFeasiblePoint, ArithmeticError, DomainError) as exc:
            log.warning("cq=%s cs=%s %s: %s", cq, cs, alg, exc)
            rows.append(result_row(params, sc, alg, None, "infeasible"))
            continue
        done[alg] = res
        rows.append(result_row(params, sc, alg, res))
    if "sieve-const" in done and "sieve-arith" in done:
        row = result_row(params, sc, "improvement", None)
        row["exponent"] = done["sieve-const"].c - done["sieve-arith"].c
        rows.append(row)
    return rows


def write_rows(rows, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(format_row(row))


def run_sweep(grid: SweepGrid, workers: int = 1, cache=None) -> list[dict]:
    jobs = [(cq, cs, grid, cache) for cq, cs in grid.points()]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            chunks = list(ex.map(_sweep_point, jobs))
    else:
        chunks = [_sweep_point(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def cmd_sweep(args) -> int:
    grid = SweepGrid(args.cq_min, args.cq_max, args.cq_steps, args.cs_min, args.cs_max,
                     args.cs_steps, Scenario(args.compute, args.samples),
                     tuple(a.strip() for a in args.compare.split(",")))
    rows = run_sweep(grid, args.workers, args.lambda_cache)
    if args.out == "-":
        write_rows(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_rows(rows, fh)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.alg not in SIEVE_ALGS:
        raise UsageError(f"oracle needs a sieve algorithm, got {args.alg!r}")
    params = ProblemParams(args.cq, args.cs)
    scenario = Scenario(args.compute, args.samples)
    try:
        validate(params, scenario)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc
    model = _model(args)
    ctx = solvers.ObjectiveContext(params, scenario, model)
    overrides = (args.alpha, args.gamma_s, args.gamma_f)
    if all(v is None for v in overrides):
        res = solve_point(params, scenario, args.alg, model, args.gamma_min)
        alpha = res.alpha_opt
        gs, gf = schedule_endpoints(res.schedule_opt)
    else:
        res = None
        alpha = ctx.alpha_max / 2 if args.alpha is None else args.alpha
        gs = 1.0 if args.gamma_s is None else args.gamma_s
        gf = gs if args.gamma_f is None else args.gamma_f
    c_asym = res.c if res is not None else solvers.objective_t2(alpha, gs, gf, ctx)
    out = {"alpha": alpha, "gamma_s": gs, "gamma_f": gf}
    for log2n in args.log2n:
        orc = discrete.solve_c_discrete(alpha, gs, gf, params, scenario, model, log2n)
        gap = abs(orc.c_discrete - c_asym) / c_asym
        print(f"log2n = {log2n:g}  c_asymptotic = {c_asym:.10f}  "
              f"c_discrete = {orc.c_discrete:.10f}  relative_gap = {gap:.3e}")
    print("  ".join(f"{k} = {fmt(v)}" for k, v in out.items()))
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _add_point_flags(p, sieve_only=False):
    p.add_argument("--cq", type=float, default=2.0)
    p.add_argument("--cs", type=float, default=1.5)
    choices = list(SIEVE_ALGS) if sieve_only else list(ALGORITHMS)
    p.add_argument("--alg", choices=choices, default="sieve-arith")
    p.add_argument("--samples", choices=[s.value for s in Samples], default="exponential")
    p.add_argument("--compute", choices=[c.value for c in Compute], default="classical")
    p.add_argument("--gamma-min", type=float, default=None,
                   help="lower end of the gamma search box")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bkwsieve", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key = value file supplying defaults for any flag")
    parser.add_argument("--lambda-cache", help="CSV cache for the lambda(gamma) table")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="optimal exponent for one algorithm")
    _add_point_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("lambda", help="sieving exponent lambda(gamma)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--compute", choices=[c.value for c in Compute], default="classical")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("table1", help="sieve exponents at cq=2, cs=1.5 for all scenarios")
    p.add_argument("--constant-gamma-min", type=float, default=None,
                   help="lower end of the gamma box for the constant schedule only")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="grid of exponents over (cq, cs) as CSV")
    for name, default in (("cq-min", 1.0), ("cq-max", 3.0), ("cs-min", 0.55), ("cs-max", 2.95)):
        p.add_argument(f"--{name}", type=float, default=default)
    p.add_argument("--cq-steps", type=int, default=41)
    p.add_argument("--cs-steps", type=int, default=41)
    p.add_argument("--samples", choices=[s.value for s in Samples], default="exponential")
    p.add_argument("--compute", choices=[c.value for c in Compute], default="classical")
    p.add_argument("--compare", default="sieve-const,sieve-arith",
                   help="comma-separated algorithms")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="finite-n recursion check of a sieve exponent")
    _add_point_flags(p, sieve_only=True)
    p.add_argument("--log2n", type=float, nargs="+", default=[256.0])
    p.add_argument("--alpha", type=float, default=None, help="use this alpha instead of optimizing")
    p.add_argument("--gamma-s", type=float, default=None)
    p.add_argument("--gamma-f", type=float, default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    config = read_config(known.config)
    parser.set_defaults(**{k: v for k, v in config.items() if k in ("lambda_cache",)})
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for subparser in sub.choices.values():
        dests = {a.dest: a for a in subparser._actions}
        values = {}
        for key, raw in config.items():
            action = dests.get(key)
            if action is None:
                continue
            if action.nargs == "+":
                values[key] = [action.type(x) for x in raw.split()]
            elif action.const is True:  # store_true
                values[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = action.type(raw) if action.type else raw
        subparser.set_defaults(**values)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except (UsageError, OSError, ValueError) as exc:
        print(f"bkwsieve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bkwsieve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (discrete.BisectionFailure, NoFeasiblePoint, ArithmeticError, DomainError,
            InvalidParams) as exc:
        print(f"bkwsieve: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
