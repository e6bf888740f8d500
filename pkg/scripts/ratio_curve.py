"""Likelihood ratio versus p for seven disjoint paths (1, 8, 15 relays say 1; four 6-relay paths say 0)."""
import argparse
import csv
import math
import sys

import numpy as np

from topodecide.cutset import conditional_likelihoods
from topodecide.decision import ratio_threshold
from topodecide.topology import MessageCopy, build_path_system, partition


def seven_paths():
    ids = iter(range(1, 100))
    spec = [(1, 1), (8, 1), (15, 1), (6, 0), (6, 0), (6, 0), (6, 0)]
    return [MessageCopy(c, tuple(next(ids) for _ in range(size))) for size, c in spec]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-min", type=float, default=0.01)
    ap.add_argument("--p-max", type=float, default=0.5)
    ap.add_argument("--steps", type=int, default=100)
    args = ap.parse_args()

    part = partition(build_path_system(seven_paths()))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "f1", "f2", "ratio"])
    for p in np.linspace(args.p_min, args.p_max, args.steps + 1):
        lik = conditional_likelihoods(part, float(p))
        w.writerow([f"{p:.6g}", f"{lik.given_one:.10g}", f"{lik.given_zero:.10g}",
                    f"{math.exp(lik.log_ratio):.10g}"])
    print(f"# ratio crosses 1 at p = {ratio_threshold(part, args.p_min, args.p_max):.6f}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
