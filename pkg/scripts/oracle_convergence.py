"""Finite-n recursion exponent against the asymptotic optimum as n grows."""
import argparse

from bkwsieve import REGEV, Scenario, default_model, solve_all_schedules
from bkwsieve.core import schedule_endpoints
from bkwsieve.discrete import solve_c_discrete


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--compute", default="classical")
    ap.add_argument("--samples", default="exponential")
    ap.add_argument("--log2n", type=float, nargs="+", default=[64, 128, 256, 512, 1024])
    args = ap.parse_args()
    sc = Scenario(args.compute, args.samples)
    model = default_model()
    for key, res in solve_all_schedules(REGEV, sc, model).items():
        gs, gf = schedule_endpoints(res.schedule_opt)
        print(f"{key}: c = {res.c:.6f} at alpha = {res.alpha_opt:.4f}, gamma {gs:.4f} -> {gf:.4f}")
        prev = None
        for n in args.log2n:
            orc = solve_c_discrete(res.alpha_opt, gs, gf, REGEV, sc, model, n)
            gap = orc.c_discrete - res.c
            # gap * log2n roughly constant when the correction is Theta(1/log n)
            ratio = "" if prev is None else f"  ratio {prev / gap:.3f}"
            print(f"  log2n {n:6g}: c_discrete {orc.c_discrete:.6f}  gap {gap:+.2e}  "
                  f"gap*log2n {gap * n:.4f}{ratio}")
            prev = gap


if __name__ == "__main__":
    main()
