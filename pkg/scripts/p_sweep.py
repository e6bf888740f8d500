"""P_succ of every rule as the malicious fraction grows."""
import argparse
import sys
import time
from pathlib import Path
from dataclasses import replace

from topodecide.experiment import SweepSpec, sweep
from topodecide.netsim import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/road_2km.json")
    ap.add_argument("--grid", default="0.02,0.04,0.06,0.08,0.1,0.12,0.14,0.16,0.18,0.2,0.4,0.6,0.8")
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--mode", default="stratified", choices=("stratified", "prior"))
    ap.add_argument("--out", default="results/p_sweep.csv")
    args = ap.parse_args()

    base = replace(load_config(args.config), seed=args.seed)
    spec = SweepSpec(base, "p", tuple(map(float, args.grid.split(","))), args.trials,
                     mode=args.mode)
    t0 = time.perf_counter()
    res = sweep(spec, progress=lambda v: print(f"p={v} done {time.perf_counter() - t0:.0f}s",
                                               file=sys.stderr))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    res.write_csv(args.out)
    for r in res.rows:
        print(f"{r.value:<6g} {r.algorithm:<10} {r.psucc:.4f} +- {r.ci95:.4f}")


if __name__ == "__main__":
    main()
