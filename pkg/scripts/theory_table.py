"""Table of asymptotic centers and variances for every index with a limit law.

    python scripts/theory_table.py --models uniform:0,1 exponential:1 --q 0.3 0.5
"""

import argparse
import csv
import sys
import time

from gpindex.asymptotics import limit_law
from gpindex.models import parse_model_spec
from gpindex.sample import IndexId

INDICES = [
    IndexId("fgt", alpha=0), IndexId("fgt", alpha=0.5), IndexId("fgt", alpha=1), IndexId("fgt", alpha=2),
    IndexId("sen"), IndexId("kakwani", k=2), IndexId("shorrocks"), IndexId("thon"),
    IndexId("chu", alpha=0.5), IndexId("ray", alpha=2),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--models", nargs="+", default=["uniform:0,1", "exponential:1", "pareto:1,2", "lognormal:0,0.7"])
    ap.add_argument("--q", nargs="+", type=float, default=[0.3, 0.5], help="headcounts fixing the poverty line")
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["model", "q", "Z", "index", "D", "variance", "center", "transformed_variance",
                  "uncorrected_variance", "seconds"])
    for spec in args.models:
        model = parse_model_spec(spec)
        for q in args.q:
            Z = float(model.quantile(q))
            for idx in INDICES:
                t0 = time.perf_counter()
                law = limit_law(idx, model, Z)
                raw = limit_law(idx, model, Z, corrected=False)
                out.writerow([spec, q, repr(Z), str(idx), repr(law.D), repr(law.variance),
                              repr(law.transformed_center), repr(law.transformed_variance),
                              repr(raw.transformed_variance), f"{time.perf_counter() - t0:.3f}"])


if __name__ == "__main__":
    main()
