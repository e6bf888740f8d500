"""Decision rules for the true content behind conflicting message copies.

Two topology-aware rules (the Bayes-optimal likelihood-ratio test and the
p-free cut-set comparison) and three voting baselines.  Every rule takes an
explicit ``numpy.random.Generator``; it is consumed only to break exact ties.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .cutset import DEFAULT_BUDGET, cut_profile, observation_likelihoods
from .errors import InconsistentObservation, NotConflicting, SingularCovariance
from .topology import MessageCopy, Partition, PathSystem, build_path_system, partition

RULES = ("optimum", "heuristic", "majority", "wv_mmse", "wv_hop")
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CostMatrix:
    """``uij`` is the cost of deciding ``i`` when the source sent ``j``."""

    u00: float = 0.0
    u01: float = 1.0
    u10: float = 1.0
    u11: float = 0.0

    def __post_init__(self):
        if not (self.u01 > self.u11 and self.u10 > self.u00):
            raise ValueError("wrong decisions must cost more than right ones")

    def log_threshold(self, p1: float) -> float:
        p0 = 1.0 - p1
        return math.log(p0 * (self.u10 - self.u00)) - math.log(p1 * (self.u01 - self.u11))


@dataclass(frozen=True)
class Verdict:
    d: int
    rule: str
    tie: bool = False
    diagnostics: dict = field(default_factory=dict)


def rule_rng(seed: int, rule: str) -> np.random.Generator:
    """Independent tie-break stream for one rule, so rules never share draws."""
    return np.random.default_rng([int(seed), RULES.index(rule)])


def _coin(rng: np.random.Generator) -> int:
    return int(rng.integers(2))


def _compare(score: float, rng, rule: str, diagnostics: dict) -> Verdict:
    if abs(score) <= TIE_TOL:
        return Verdict(_coin(rng), rule, True, diagnostics)
    return Verdict(int(score > 0), rule, False, diagnostics)


def _settled(ps: PathSystem, rule: str) -> Verdict | None:
    content = ps.unanimous
    if content is None:
        return None
    why = "direct" if ps.direct else "unanimous"
    return Verdict(content, rule, False, {"reason": why})


def decide_optimum(ps: PathSystem, p: float, p1: float, cost: CostMatrix | None = None,
                   rng: np.random.Generator | None = None, unanimous: str = "follow",
                   budget: int = DEFAULT_BUDGET) -> Verdict:
    """Likelihood-ratio test against ``P0 (u10 - u00) / (P1 (u01 - u11))``.

    With ``unanimous="follow"`` agreeing copies are trusted as-is; with
    ``"bayes"`` the ratio test is applied to them as well, which is the rule
    that minimises expected cost over every possible observation.
    """
    if unanimous not in ("follow", "bayes"):
        raise ValueError("unanimous must be 'follow' or 'bayes'")
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"p1 must lie in (0, 1), got {p1}")
    cost = cost or CostMatrix()
    rng = rng if rng is not None else np.random.default_rng()
    if ps.direct or (unanimous == "follow"):
        settled = _settled(ps, "optimum")
        if settled is not None:
            return settled

    lik = observation_likelihoods(partition(ps), p, budget)
    if lik.log_one == -math.inf and lik.log_zero == -math.inf:
        raise InconsistentObservation("observation impossible for either source value")
    log_thr = cost.log_threshold(p1)
    diag = {
        "log_ratio": lik.log_ratio,
        "log_threshold": log_thr,
        "given_one": lik.given_one,
        "given_zero": lik.given_zero,
    }
    return _compare(lik.log_ratio - log_thr, rng, "optimum", diag)


def decide_heuristic(ps: PathSystem, rng: np.random.Generator | None = None,
                     budget: int = DEFAULT_BUDGET) -> Verdict:
    """Trust the side whose paths need more malicious relays to compromise.

    ``r0`` and ``r1`` are the minimum cut-set sizes of the content-0 and
    content-1 sub-networks (Type 0 / Type 1 relays only); equal sizes are
    broken by the number of minimum cut sets.  A side whose paths cannot all
    be compromised has no cut set and is trusted outright.
    """
    rng = rng if rng is not None else np.random.default_rng()
    settled = _settled(ps, "heuristic")
    if settled is not None:
        return settled

    part = partition(ps)
    prof0 = cut_profile(part.b0, stop_at_r=True, budget=budget)
    prof1 = cut_profile(part.b1, stop_at_r=True, budget=budget)
    r0, r1 = prof0.r, prof1.r
    diag = {"r0": r0, "r1": r1, "a_r0": prof0.count_at_r, "b_r1": prof1.count_at_r,
            "n0": part.n0, "n1": part.n1}
    if r0 is None and r1 is None:
        raise InconsistentObservation("neither side can be fully compromised")
    if r0 is None:
        return Verdict(0, "heuristic", False, diag)
    if r1 is None:
        return Verdict(1, "heuristic", False, diag)
    if r0 != r1:
        return Verdict(int(r0 < r1), "heuristic", False, diag)
    return _compare(prof0.count_at_r - prof1.count_at_r, rng, "heuristic", diag)


def decide_majority(ps: PathSystem, rng: np.random.Generator | None = None) -> Verdict:
    rng = rng if rng is not None else np.random.default_rng()
    if ps.direct:
        return _settled(ps, "majority")
    k1 = ps.k1
    k0 = ps.k - k1
    return _compare(k1 - k0, rng, "majority", {"k1": k1, "k0": k0})


def weighted_vote(contents: Sequence[int], weights: np.ndarray, rng, rule: str,
                  diagnostics: dict) -> Verdict:
    weights = np.asarray(weights, dtype=float)
    ones = float(weights[np.asarray(contents, dtype=bool)].sum())
    score = ones - 0.5 * float(weights.sum())
    diagnostics = dict(diagnostics, weights=[float(w) for w in weights])
    return _compare(score, rng, rule, diagnostics)


def error_covariance(ps: PathSystem, p: float) -> np.ndarray:
    """Pairwise probability that two paths are both compromised.

    The error of copy ``i`` is ``M_i - m0``, nonzero exactly when path ``i``
    holds a malicious relay, and every error has the same sign, so
    ``E[(M_i - m0)(M_j - m0)]`` is the probability both paths are hit.
    """
    m = ps.matrix.astype(np.int64)
    size = m.sum(axis=1)
    union = size[:, None] + size[None, :] - m @ m.T
    q = 1.0 - p
    return 1.0 - q ** size[:, None] - q ** size[None, :] + q ** union


def mmse_weights(cov: np.ndarray) -> tuple[np.ndarray, bool]:
    """Weights ``C^-1 1 / (1' C^-1 1)`` and whether ridge regularisation was needed."""
    k = cov.shape[0]
    ones = np.ones(k)
    try:
        if np.linalg.cond(cov) > 1e12:
            raise SingularCovariance("error covariance is singular")
        x = np.linalg.solve(cov, ones)
        ridged = False
    except (np.linalg.LinAlgError, SingularCovariance):
        eps = 1e-9 * float(np.trace(cov)) / k
        x = np.linalg.solve(cov + eps * np.eye(k), ones)
        ridged = True
    return x / x.sum(), ridged


def decide_wv_mmse(ps: PathSystem, p: float, rng: np.random.Generator | None = None) -> Verdict:
    rng = rng if rng is not None else np.random.default_rng()
    settled = _settled(ps, "wv_mmse")
    if settled is not None:
        return settled
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    w, ridged = mmse_weights(error_covariance(ps, p))
    return weighted_vote(ps.contents, w, rng, "wv_mmse", {"ridge": int(ridged)})


def decide_wv_hop(ps: PathSystem, alpha: float = 0.9,
                  rng: np.random.Generator | None = None) -> Verdict:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    rng = rng if rng is not None else np.random.default_rng()
    if ps.direct:
        return _settled(ps, "wv_hop")
    raw = np.array([alpha ** (h - 1) for h in ps.hops])
    return weighted_vote(ps.contents, raw / raw.sum(), rng, "wv_hop", {})


def apply_rule(rule: str, ps: PathSystem, *, p: float, p1: float, alpha: float = 0.9,
               rng: np.random.Generator, cost: CostMatrix | None = None,
               unanimous: str = "follow") -> Verdict:
    if rule == "optimum":
        return decide_optimum(ps, p, p1, cost, rng, unanimous=unanimous)
    if rule == "heuristic":
        return decide_heuristic(ps, rng)
    if rule == "majority":
        return decide_majority(ps, rng)
    if rule == "wv_mmse":
        return decide_wv_mmse(ps, p, rng)
    if rule == "wv_hop":
        return decide_wv_hop(ps, alpha, rng)
    raise ValueError(f"unknown rule {rule!r}; choose from {', '.join(RULES)}")


def likelihood_ratio_curve(part: Partition, p_grid: Iterable[float]) -> list[tuple[float, float]]:
    if not part.conflicting:
        raise NotConflicting(f"k1={part.k1} of k={part.k}: contents agree")
    out = []
    for p in p_grid:
        lr = observation_likelihoods(part, p).log_ratio
        out.append((float(p), math.exp(lr) if lr < 700 else math.inf))
    return out


def ratio_threshold(part: Partition, lo: float = 1e-4, hi: float = 0.5,
                    steps: int = 500, log_level: float = 0.0) -> float | None:
    """Smallest ``p`` in ``[lo, hi]`` where the log-likelihood ratio crosses ``log_level``."""
    if not part.conflicting:
        raise NotConflicting(f"k1={part.k1} of k={part.k}: contents agree")

    def g(p):
        return observation_likelihoods(part, p).log_ratio - log_level

    grid = np.linspace(lo, hi, steps + 1)
    vals = [g(p) for p in grid]
    for a, b, ga, gb in zip(grid, grid[1:], vals, vals[1:]):
        if ga == 0:
            return float(a)
        if math.isfinite(ga) and math.isfinite(gb) and ga * gb < 0:
            return float(brentq(g, a, b, xtol=1e-14, rtol=1e-14))
    return None


# exhaustive evaluation over every malicious subset -------------------------

def observation_table(paths: Sequence[Sequence[int]], p: float, p1: float
                      ) -> dict[tuple[int, ...], tuple[float, float]]:
    """Map each reachable content vector to ``(Pr(obs, m0=0), Pr(obs, m0=1))``."""
    relays = sorted({v for path in paths for v in path})
    col = {v: j for j, v in enumerate(relays)}
    masks = [sum(1 << col[v] for v in path) for path in paths]
    n = len(relays)
    table: dict[tuple[int, ...], list[float]] = {}
    for s in range(1 << n):
        bad = bin(s).count("1")
        w = p**bad * (1 - p) ** (n - bad)
        hit = tuple(int(bool(m & s)) for m in masks)
        for m0, prior in ((0, 1 - p1), (1, p1)):
            obs = tuple(h ^ m0 for h in hit)
            entry = table.setdefault(obs, [0.0, 0.0])
            entry[m0] += prior * w
    return {obs: (v[0], v[1]) for obs, v in table.items()}


def decision_probabilities(paths: Sequence[Sequence[int]], observations: Iterable[tuple[int, ...]],
                           decide: Callable[[PathSystem, np.random.Generator], Verdict]
                           ) -> dict[tuple[int, ...], float]:
    """Pr(d = 1) for each observation; an exact tie counts as a fair coin."""
    rng = np.random.default_rng(0)
    out = {}
    for obs in observations:
        ps = build_path_system(MessageCopy(c, tuple(path)) for c, path in zip(obs, paths))
        v = decide(ps, rng)
        out[obs] = 0.5 if v.tie else float(v.d)
    return out


def exact_psucc(table: dict[tuple[int, ...], tuple[float, float]],
                prob_one: dict[tuple[int, ...], float]) -> float:
    return math.fsum(pr0 * (1 - prob_one[obs]) + pr1 * prob_one[obs]
                     for obs, (pr0, pr1) in table.items())


def rule_decider(rule: str, p: float, p1: float, alpha: float = 0.9,
                 unanimous: str = "follow") -> Callable[[PathSystem, np.random.Generator], Verdict]:
    def decide(ps, rng):
        return apply_rule(rule, ps, p=p, p1=p1, alpha=alpha, rng=rng, unanimous=unanimous)
    return decide
