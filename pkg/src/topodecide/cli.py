"""Command-line front end.

    topodecide decide scenario.json --p 0.1 --p1 0.5 --seed 7
    topodecide oracle --cases 200 --max-n 12 --seed 1
    topodecide sweep --config base.json --vary p --grid 0.02,0.04 --out sweep.csv
    topodecide ratio scenario.json --p-min 0.01 --p-max 0.5 --steps 50

Output is ``key=value`` lines ending in ``status=ok``.
"""
from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from dataclasses import replace

import numpy as np

from . import cutset
from .decision import RULES, apply_rule, ratio_threshold, rule_rng
from .errors import DuplicateConflict, EmptyInput, InconsistentObservation, SizeLimit
from .experiment import MODES, VARIABLE, SweepSpec, dump_writer, sweep
from .netsim import load_config
from .topology import MessageCopy, build_path_system, load_scenario, partition

EXIT_MISMATCH = 1
EXIT_BAD_INPUT = 2
EXIT_INCONSISTENT = 3


class BadInput(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    if isinstance(x, (list, tuple)):
        return ",".join(_fmt(v) for v in x)
    if x is None:
        return "none"
    return str(x)


def _line(pairs: dict) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in pairs.items())


def _probability(value, name: str, allow_none: bool = False):
    if value is None:
        if allow_none:
            return None
        raise BadInput(f"--{name} is required")
    if not 0.0 < value < 1.0:
        raise BadInput(f"--{name} must lie in (0, 1)")
    return value


def cmd_decide(args, out) -> int:
    try:
        scenario = load_scenario(args.scenario)
        ps = build_path_system(scenario["copies"])
    except (OSError, ValueError, EmptyInput, DuplicateConflict) as exc:
        raise BadInput(str(exc)) from exc
    p = args.p if args.p is not None else scenario.get("p")
    p1 = args.p1 if args.p1 is not None else scenario.get("p1", 0.001)
    alpha = args.alpha if args.alpha is not None else scenario.get("alpha", 0.9)
    algos = RULES if args.algo == "all" else (args.algo,)
    needs_p = any(a in ("optimum", "wv_mmse") for a in algos) and ps.unanimous is None
    _probability(p, "p", allow_none=not needs_p)
    _probability(p1, "p1")
    if not 0.0 < alpha <= 1.0:
        raise BadInput("--alpha must lie in (0, 1]")

    seed = args.seed
    print(_line({"seed": seed, "k": ps.k, "n": ps.n, "k1": ps.k1}), file=out)
    rows = []
    for a in algos:
        try:
            v = apply_rule(a, ps, p=p, p1=p1, alpha=alpha, rng=rule_rng(seed, a),
                           unanimous=args.unanimous)
        except InconsistentObservation as exc:
            print(_line({"algo": a, "error": "inconsistent_observation"}), file=out)
            print(f"status=error reason={exc}".replace("\n", " "), file=out)
            return EXIT_INCONSISTENT
        except SizeLimit as exc:
            raise BadInput(str(exc)) from exc
        rows.append({"algo": a, "d": v.d, "tie": int(v.tie), **v.diagnostics})

    if args.pretty:
        width = max(len(r["algo"]) for r in rows)
        for r in rows:
            extra = "  ".join(f"{k}={_fmt(v)}" for k, v in r.items() if k not in ("algo", "d", "tie"))
            mark = " (tie)" if r["tie"] else ""
            print(f"{r['algo']:<{width}}  d={r['d']}{mark}  {extra}".rstrip(), file=out)
    else:
        for r in rows:
            print(_line(r), file=out)
    print("status=ok", file=out)
    return 0


def random_instance(rng: np.random.Generator, max_n: int, max_k: int = 6):
    """Random conflicting observation over distinct, loop-free relay paths."""
    while True:
        n = int(rng.integers(1, max_n + 1))
        k = int(rng.integers(2, max_k + 1))
        paths = set()
        for _ in range(4 * k):
            size = int(rng.integers(1, n + 1))
            paths.add(tuple(int(v) for v in rng.permutation(n)[:size] + 1))
            if len(paths) == k:
                break
        paths = sorted(paths)
        if len(paths) < 2:
            continue
        contents = rng.integers(0, 2, len(paths))
        if 0 < contents.sum() < len(paths):
            return [MessageCopy(int(c), p) for c, p in zip(contents, paths)]


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def run_oracle(cases: int, max_n: int, seed: int, out, tol: float = 1e-12,
               likelihoods=None) -> int:
    likelihoods = likelihoods or cutset.conditional_likelihoods
    rng = np.random.default_rng(seed)
    worst = 0.0
    for case in range(cases):
        copies = random_instance(rng, max_n)
        p = float(rng.choice([0.05, 0.1, 0.3]))
        ps = build_path_system(copies)
        lik = likelihoods(partition(ps), p)
        errs = (
            _rel_err(lik.given_one, cutset.brute_force_conditional(ps, p, 1)),
            _rel_err(lik.given_zero, cutset.brute_force_conditional(ps, p, 0)),
        )
        worst = max(worst, *errs)
        if max(errs) > tol:
            instance = {"p": p, "copies": [{"content": c.content, "path": list(c.path)}
                                           for c in copies]}
            print(_line({"mismatch": case, "rel_err": max(errs)}), file=out)
            print("instance=" + json.dumps(instance, sort_keys=True), file=out)
            print("status=fail", file=out)
            return EXIT_MISMATCH
    print(_line({"cases": cases, "max_n": max_n, "seed": seed, "max_rel_err": worst}), file=out)
    print("status=ok", file=out)
    return 0


def cmd_oracle(args, out) -> int:
    if args.cases < 1 or args.max_n < 1:
        raise BadInput("--cases and --max-n must be positive")
    return run_oracle(args.cases, args.max_n, args.seed, out)


def _grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise BadInput(f"bad --grid {text!r}") from exc
    if not values:
        raise BadInput("--grid is empty")
    return values


def cmd_sweep(args, out) -> int:
    try:
        base = load_config(args.config)
        if args.seed_given:
            base = replace(base, seed=args.seed)
        algos = RULES if args.algos == "all" else tuple(a for a in args.algos.split(","))
        spec = SweepSpec(base, args.vary, _grid(args.grid), args.trials, algos, args.mode,
                         args.alpha)
    except (OSError, ValueError, TypeError) as exc:
        raise BadInput(str(exc)) from exc

    if args.dump_trials:
        with open(args.dump_trials, "w", encoding="utf-8", newline="\n") as fh:
            result = sweep(spec, dump=dump_writer(fh))
    else:
        result = sweep(spec)
    result.write_csv(args.out)
    print(_line({"seed": base.seed, "vary": spec.vary, "points": len(spec.grid),
                 "trials": spec.trials, "rows": len(result.rows), "out": args.out}), file=out)
    print("status=ok", file=out)
    return 0


def cmd_ratio(args, out) -> int:
    try:
        scenario = load_scenario(args.scenario)
        ps = build_path_system(scenario["copies"])
    except (OSError, ValueError, EmptyInput, DuplicateConflict) as exc:
        raise BadInput(str(exc)) from exc
    if not (0.0 < args.p_min < args.p_max < 1.0) or args.steps < 1:
        raise BadInput("need 0 < --p-min < --p-max < 1 and --steps >= 1")
    part = partition(ps)
    if not part.conflicting or ps.direct:
        print("status=error reason=no_conflict", file=out)
        return EXIT_INCONSISTENT

    lines = ["p,f1,f2,ratio"]
    for p in np.linspace(args.p_min, args.p_max, args.steps + 1):
        lik = cutset.conditional_likelihoods(part, float(p))
        ratio = math.exp(lik.log_ratio) if lik.log_ratio < 700 else math.inf
        lines.append(f"{p:.6g},{lik.given_one:.10g},{lik.given_zero:.10g},{ratio:.10g}")
    root = ratio_threshold(part, args.p_min, args.p_max, max(args.steps, 100))
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
    else:
        out.write(csv_text)
    print(_line({"p_th": None if root is None else float(f"{root:.10g}")}), file=out)
    print("status=ok", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topodecide", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="decide one scenario with every rule")
    d.add_argument("scenario")
    d.add_argument("--p", type=float, help="fraction of malicious relays")
    d.add_argument("--p1", type=float, help="prior probability that the source sent 1")
    d.add_argument("--alpha", type=float, help="hop discount for wv_hop (default 0.9)")
    d.add_argument("--seed", type=int)
    d.add_argument("--algo", default="all", choices=("all",) + RULES)
    d.add_argument("--unanimous", default="follow", choices=("follow", "bayes"),
                   help="optimum rule on agreeing copies: trust them or run the ratio test")
    d.add_argument("--pretty", action="store_true")
    d.set_defaults(func=cmd_decide)

    o = sub.add_parser("oracle", help="check closed-form likelihoods against brute force")
    o.add_argument("--max-n", type=int, default=12)
    o.add_argument("--cases", type=int, default=200)
    o.add_argument("--seed", type=int)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="Monte Carlo sweep over p, wait or rho")
    s.add_argument("--config", required=True)
    s.add_argument("--vary", required=True, choices=VARIABLE)
    s.add_argument("--grid", required=True, help="comma-separated values")
    s.add_argument("--trials", type=int, default=5000)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--algos", default="all", help="comma-separated rules or 'all'")
    s.add_argument("--mode", default="stratified", choices=MODES)
    s.add_argument("--alpha", type=float, default=0.9)
    s.add_argument("--dump-trials", help="write every trial as a JSON line")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("ratio", help="likelihood ratio curve and its crossing of 1")
    r.add_argument("scenario")
    r.add_argument("--p-min", type=float, default=0.01)
    r.add_argument("--p-max", type=float, default=0.5)
    r.add_argument("--steps", type=int, default=49)
    r.add_argument("--out")
    r.set_defaults(func=cmd_ratio)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "seed"):
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = secrets.randbelow(2**32)
    try:
        return args.func(args, out)
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("status=error reason=bad_input", file=out)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
