"""P_succ against the waiting window at two vehicle densities.

The sweep CSV records only the varied field, so one file is written per
density: ``<out stem>_rho<value>.csv``.
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path

from topodecide.experiment import SweepSpec, sweep
from topodecide.netsim import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--config", default="configs/road_2km.json")
    ap.add_argument("--densities", default="0.005,0.01")
    ap.add_argument("--grid", default="0,0.05,0.1,0.15,0.2,0.25,0.3")
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--algorithms", default="optimum,heuristic,majority")
    ap.add_argument("--out", default="results/wait_sweep.csv")
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    for rho in map(float, args.densities.split(",")):
        base = replace(load_config(args.config), rho=rho, seed=args.seed)
        spec = SweepSpec(base, "wait", tuple(map(float, args.grid.split(","))), args.trials,
                         tuple(args.algorithms.split(",")))
        res = sweep(spec)
        res.write_csv(out.with_name(f"{out.stem}_rho{rho:g}{out.suffix}"))
        for r in res.rows:
            print(f"rho={rho:<6g} T={r.value * 1000:>4.0f}ms {r.algorithm:<10} {r.psucc:.4f}"
                  f" +- {r.ci95:.4f} k={r.mean_k:.1f}", file=sys.stderr)


if __name__ == "__main__":
    main()
