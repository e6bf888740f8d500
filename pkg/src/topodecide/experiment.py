"""Monte Carlo estimation of the probability of a correct decision.

Every trial draws its randomness from ``SeedSequence([seed, trial])``, so the
same trial index sees the same road and nested attacker sets at every grid
value (common random numbers), and all rules are scored on identical copies.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .decision import RULES, apply_rule, rule_rng
from .errors import NoRoute, TopoDecideError
from .netsim import Road, ScenarioConfig, connected_road, run_trial, tamper
from .topology import build_path_system, copies_to_dict

CSV_FIELDS = ("vary", "value", "algorithm", "psucc", "ci95", "discard_rate",
              "mean_k", "mean_n", "trials", "seed")
VARIABLE = ("p", "wait", "rho")
MODES = ("stratified", "prior")


def wilson_halfwidth(phat: float, n: int, z: float = 1.959963984540054) -> float:
    if n == 0:
        return math.nan
    denom = 1 + z * z / n
    return z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom


@dataclass
class Estimate:
    psucc: dict[str, float]
    ci95: dict[str, float]
    trials: int
    valid: int
    discard_rate: float
    mean_k: float
    mean_n: float
    errors: dict[str, int] = field(default_factory=dict)


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(trial)])


def decision_seed(seed: int, trial: int, m0: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(trial), 2 + m0]).generate_state(1)[0])


class RoadCache:
    """Connected roads keyed by trial, shared across grid values that keep the geometry."""

    def __init__(self):
        self._store: dict[tuple, tuple[Road | None, int]] = {}

    def get(self, cfg: ScenarioConfig, seed: int, trial: int) -> tuple[Road | None, int]:
        key = (seed, trial, cfg.rho, cfg.dist, cfg.range, cfg.max_retries)
        hit = self._store.get(key)
        if hit is None:
            road_rng = np.random.default_rng(trial_seed(seed, trial)).spawn(3)[0]
            try:
                hit = connected_road(cfg, road_rng)
            except NoRoute:
                hit = (None, cfg.max_retries)
            self._store[key] = hit
        return hit


def estimate_psucc(cfg: ScenarioConfig, algorithms: Sequence[str] = RULES, trials: int = 5000,
                   seed: int | None = None, mode: str = "stratified", alpha: float = 0.9,
                   cache: RoadCache | None = None,
                   dump: Callable[[dict], None] | None = None) -> Estimate:
    """Fraction of trials decided correctly, per rule.

    In ``"stratified"`` mode each trial is scored under both source values
    with the same road and attackers, weighted by ``(1 - p1, p1)``; in
    ``"prior"`` mode the source value is sampled from the prior.  Trials whose
    roads never connect are excluded and reported through ``discard_rate``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if trials < 1:
        raise ValueError("trials must be positive")
    for a in algorithms:
        if a not in RULES:
            raise ValueError(f"unknown algorithm {a!r}")
    seed = cfg.seed if seed is None else seed
    cache = cache or RoadCache()

    score = dict.fromkeys(algorithms, 0.0)
    errors = dict.fromkeys(algorithms, 0)
    valid = drawn = discarded = 0
    sum_k = sum_n = 0
    for t in range(trials):
        road, skipped = cache.get(cfg, seed, t)
        discarded += skipped
        drawn += skipped
        if road is None:
            continue
        drawn += 1
        outcome = run_trial(cfg, np.random.default_rng(trial_seed(seed, t)), road=road,
                            discarded=skipped)
        valid += 1
        paths = [c.path for c in outcome.copies]
        sum_k += len(paths)
        sum_n += len({v for path in paths for v in path})

        if mode == "stratified":
            strata = [(0, 1.0 - cfg.p1), (1, cfg.p1)]
        else:
            strata = [(outcome.m0, 1.0)]
        for m0, weight in strata:
            copies = tamper(paths, outcome.malicious, m0)
            ps = build_path_system(copies)
            dseed = decision_seed(seed, t, m0)
            verdicts = {}
            for a in algorithms:
                try:
                    v = apply_rule(a, ps, p=cfg.p, p1=cfg.p1, alpha=alpha,
                                   rng=rule_rng(dseed, a))
                except TopoDecideError:
                    errors[a] += 1
                    verdicts[a] = None
                    continue
                verdicts[a] = v.d
                if v.d == m0:
                    score[a] += weight
            if dump is not None:
                dump({"trial": t, "m0": m0, "seed": dseed, "p": cfg.p, "p1": cfg.p1,
                      "alpha": alpha, "copies": copies_to_dict(copies), "verdicts": verdicts})

    psucc = {a: (score[a] / valid if valid else math.nan) for a in algorithms}
    ci = {a: wilson_halfwidth(min(max(psucc[a], 0.0), 1.0), valid) for a in algorithms}
    return Estimate(
        psucc=psucc,
        ci95=ci,
        trials=trials,
        valid=valid,
        discard_rate=discarded / drawn if drawn else 0.0,
        mean_k=sum_k / valid if valid else math.nan,
        mean_n=sum_n / valid if valid else math.nan,
        errors=errors,
    )


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    vary: str
    grid: tuple[float, ...]
    trials: int = 5000
    algorithms: tuple[str, ...] = RULES
    mode: str = "stratified"
    alpha: float = 0.9

    def __post_init__(self):
        if self.vary not in VARIABLE:
            raise ValueError(f"vary must be one of {VARIABLE}")
        if not self.grid:
            raise ValueError("grid must not be empty")
        for value in self.grid:
            replace(self.base, **{self.vary: value})  # validates the value
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class SweepRow:
    vary: str
    value: float
    algorithm: str
    psucc: float
    ci95: float
    discard_rate: float
    mean_k: float
    mean_n: float
    trials: int
    seed: int


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def series(self, algorithm: str) -> list[SweepRow]:
        return [r for r in self.rows if r.algorithm == algorithm]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow([r.vary, _fmt(r.value), r.algorithm, _fmt(r.psucc), _fmt(r.ci95),
                        _fmt(r.discard_rate), _fmt(r.mean_k), _fmt(r.mean_n), r.trials, r.seed])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def sweep(spec: SweepSpec, dump: Callable[[dict], None] | None = None,
          progress: Callable[[float], None] | None = None) -> SweepResult:
    cache = RoadCache()
    rows = []
    for value in spec.grid:
        cfg = replace(spec.base, **{spec.vary: value})
        est = estimate_psucc(cfg, spec.algorithms, spec.trials, cfg.seed, spec.mode,
                             spec.alpha, cache, dump)
        for a in spec.algorithms:
            rows.append(SweepRow(spec.vary, float(value), a, est.psucc[a], est.ci95[a],
                                 est.discard_rate, est.mean_k, est.mean_n, spec.trials,
                                 cfg.seed))
        if progress is not None:
            progress(value)
    return SweepResult(rows)


def monte_carlo_fixed(paths: Sequence[Sequence[int]], p: float, p1: float,
                      algorithms: Sequence[str] = RULES, trials: int = 10000,
                      seed: int = 0, alpha: float = 0.9) -> dict[str, float]:
    """P_succ by sampling attackers and source content on a fixed path set."""
    relays = sorted({v for path in paths for v in path})
    rng = np.random.default_rng(seed)
    hits = dict.fromkeys(algorithms, 0)
    for t in range(trials):
        malicious = frozenset(v for v, u in zip(relays, rng.random(len(relays))) if u < p)
        m0 = int(rng.random() < p1)
        ps = build_path_system(tamper(paths, malicious, m0))
        for a in algorithms:
            v = apply_rule(a, ps, p=p, p1=p1, alpha=alpha, rng=rule_rng(seed + t, a))
            hits[a] += v.d == m0
    return {a: hits[a] / trials for a in algorithms}


def dump_writer(fh) -> Callable[[dict], None]:
    def write(record: dict) -> None:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return write
