"""Coverage of plug-in and bootstrap intervals across sample sizes.

    python scripts/coverage_study.py --model exponential:1 --line 0.6931 --index fgt:2 --n 250 1000 4000
"""

import argparse
import math
import time

from gpindex.models import parse_model_spec
from gpindex.montecarlo import SimulationPlan, coverage_rate

from clt_check import parse_index


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--model", default="exponential:1")
    ap.add_argument("--line", type=float, default=math.log(2))
    ap.add_argument("--index", default="fgt:2")
    ap.add_argument("--n", nargs="+", type=int, default=[250, 1000, 4000])
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--level", type=float, default=0.95)
    ap.add_argument("--bootstrap-reps", type=int, default=499)
    ap.add_argument("--methods", nargs="+", default=["plugin", "bootstrap"])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)

    model = parse_model_spec(args.model)
    idx = parse_index(args.index)
    se = math.sqrt(args.level * (1 - args.level) / args.reps)
    print(f"{idx} on {args.model}, line {args.line:g}, nominal {args.level} (binomial se {se:.4f})")
    print(f"{'n':>7}{'method':>11}{'coverage':>10}{'sec':>7}")
    for n in args.n:
        for method in args.methods:
            t0 = time.perf_counter()
            plan = SimulationPlan(model, args.line, idx, n, args.reps, args.seed, ci_method=method,
                                  level=args.level, bootstrap_reps=args.bootstrap_reps)
            cov = coverage_rate(plan, workers=args.workers)
            print(f"{n:>7}{method:>11}{cov:10.3f}{time.perf_counter() - t0:7.1f}")


if __name__ == "__main__":
    main()
