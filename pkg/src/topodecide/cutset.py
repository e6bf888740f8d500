"""Malicious cut sets of a path family and the likelihoods built on them.

A set of relays is a malicious cut set of a (sub-)network when every path in
it passes through at least one relay of the set, i.e. it is a hitting set of
the rows of the boolean path matrix.  The number of cut sets of each size
determines the probability that an adversary holding each relay independently
with probability ``p`` compromises every path.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .errors import NotConflicting, SizeLimit, TooLarge
from .topology import Partition, PathSystem

DEFAULT_BUDGET = 10**8
# largest 2**m * words table built in one numpy pass
_TABLE_LIMIT = 1 << 22


@dataclass(frozen=True)
class CutProfile:
    """Cut-set counts by size.

    ``counts[i]`` is the number of size-``i`` column subsets hitting every row
    (``counts[0]`` is 1 only for a matrix without rows).  When built with
    ``stop_at_r`` the tuple ends at index ``r`` and ``complete`` is False.
    """

    counts: tuple[int, ...]
    r: int | None
    m: int
    complete: bool = True

    @property
    def count_at_r(self) -> int:
        return 0 if self.r is None else self.counts[self.r]


@dataclass(frozen=True)
class LikelihoodPair:
    """Probability of the observed message vector under each source value."""

    log_one: float
    log_zero: float
    profile0: CutProfile
    profile1: CutProfile

    @property
    def given_one(self) -> float:
        return math.exp(self.log_one)

    @property
    def given_zero(self) -> float:
        return math.exp(self.log_zero)

    @property
    def log_ratio(self) -> float:
        """``log(given_one / given_zero)``; infinite when one side is zero."""
        if self.log_one == -math.inf and self.log_zero == -math.inf:
            return math.nan
        return self.log_one - self.log_zero


def covers(cols, sub) -> int:
    sub = np.asarray(sub, dtype=bool)
    cols = list(cols)
    if sub.shape[0] == 0:
        return 1
    if not cols:
        return 0
    return int(sub[:, cols].any(axis=1).all())


def _column_masks(sub: np.ndarray) -> list[int]:
    weights = [1 << i for i in range(sub.shape[0])]
    return [sum(w for w, hit in zip(weights, sub[:, j]) if hit) for j in range(sub.shape[1])]


def _components(sub: np.ndarray) -> list[tuple[list[int], list[int]]]:
    """Split into blocks of rows that share columns, as (rows, cols) pairs."""
    k, m = sub.shape
    g = nx.Graph()
    g.add_nodes_from(("r", i) for i in range(k))
    g.add_nodes_from(("c", j) for j in range(m))
    rows, cols = np.nonzero(sub)
    g.add_edges_from((("r", int(i)), ("c", int(j))) for i, j in zip(rows, cols))
    out = []
    for comp in nx.connected_components(g):
        rs = sorted(i for t, i in comp if t == "r")
        cs = sorted(j for t, j in comp if t == "c")
        out.append((rs, cs))
    return out


def _packing_bound(masks: Sequence[int], nrows: int) -> int:
    """Greedy count of pairwise column-disjoint rows; never exceeds the true r."""
    row_cols: list[int] = [0] * nrows
    for j, mask in enumerate(masks):
        for i in range(nrows):
            if mask >> i & 1:
                row_cols[i] |= 1 << j
    used = 0
    count = 0
    for rc in sorted(row_cols, key=lambda x: bin(x).count("1")):
        if rc & used == 0:
            used |= rc
            count += 1
    return count


def _table_counts(masks: Sequence[int], nrows: int) -> list[int]:
    m = len(masks)
    words = (nrows + 63) // 64
    cols = np.zeros((m, words), dtype=np.uint64)
    for j, mask in enumerate(masks):
        for w in range(words):
            cols[j, w] = (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    full = np.zeros(words, dtype=np.uint64)
    for w in range(words):
        bits = min(64, nrows - 64 * w)
        full[w] = np.uint64((1 << bits) - 1)

    cover = np.zeros((1, words), dtype=np.uint64)
    size = np.zeros(1, dtype=np.int8)
    for j in range(m):
        cover = np.concatenate([cover, cover | cols[j]])
        size = np.concatenate([size, size + 1])
    hit = (cover == full).all(axis=1)
    return [int(c) for c in np.bincount(size[hit], minlength=m + 1)]


def _level_counts(masks: Sequence[int], full: int, start: int, stop_first: bool,
                  budget: int) -> tuple[list[int], int]:
    m = len(masks)
    counts = [0] * (m + 1)
    work = 0
    for s in range(start, m + 1):
        level = math.comb(m, s)
        work += level
        if work > budget:
            raise SizeLimit(f"cut enumeration over {m} columns exceeds budget {budget}")
        c = 0
        for combo in itertools.combinations(masks, s):
            acc = 0
            for mask in combo:
                acc |= mask
            if acc == full:
                c += 1
        counts[s] = c
        if c and stop_first:
            return counts[: s + 1], work
    return counts, work


def _component_profile(masks: list[int], nrows: int, stop_at_r: bool,
                       budget: int) -> tuple[list[int], int]:
    m = len(masks)
    full = (1 << nrows) - 1
    words = (nrows + 63) // 64
    if (1 << m) * words <= _TABLE_LIMIT and (1 << m) <= budget:
        return _table_counts(masks, nrows), 1 << m
    if stop_at_r:
        return _level_counts(masks, full, max(1, _packing_bound(masks, nrows)), True, budget)
    if (1 << m) > budget:
        raise SizeLimit(f"cut enumeration over {m} columns exceeds budget {budget}")
    return _level_counts(masks, full, 1, False, budget)


def _convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def cut_profile(sub, stop_at_r: bool = False, budget: int = DEFAULT_BUDGET) -> CutProfile:
    """Count the column subsets of ``sub`` that hit every row, by size.

    Rows that share no columns are counted independently and combined by
    convolution, which keeps disjoint-path families cheap.  A row with no
    columns can never be hit, giving an all-zero profile with ``r = None``.
    """
    sub = np.asarray(sub, dtype=bool)
    if sub.ndim != 2:
        raise ValueError("sub must be a 2-d boolean matrix")
    k, m = sub.shape
    if k == 0:
        return CutProfile(tuple(math.comb(m, i) for i in range(m + 1)), 0, m)
    if not sub.any(axis=1).all():
        return CutProfile((0,) * (m + 1), None, m)

    counts = [1]
    r_total, at_r = 0, 1
    remaining = budget
    for rows, cols in _components(sub):
        if not rows:
            # a column on no row may or may not be in the set
            counts = _convolve(counts, [1, 1])
            continue
        masks = _column_masks(sub[np.ix_(rows, cols)])
        part, work = _component_profile(masks, len(rows), stop_at_r, remaining)
        remaining -= work
        if stop_at_r:
            r_c = next(i for i, c in enumerate(part) if c)
            r_total += r_c
            at_r *= part[r_c]
        else:
            counts = _convolve(counts, part)

    if stop_at_r:
        return CutProfile((0,) * r_total + (at_r,), r_total, m, complete=False)

    counts += [0] * (m + 1 - len(counts))
    r = next((i for i, c in enumerate(counts) if c), None)
    return CutProfile(tuple(counts), r, m)


def min_cut_lower_bound(sub) -> int:
    """Maximum number of vertex-disjoint source-sink paths in the union graph.

    Every row is chained in column order between a virtual source and sink and
    each column is split into an in/out pair joined by a unit-capacity arc.
    The value equals the minimum cut-set size when the rows are the only
    source-sink routes (e.g. pairwise disjoint rows); with cross-over routes it
    can exceed it, so enumeration does not rely on it for pruning.
    """
    sub = np.asarray(sub, dtype=bool)
    if sub.shape[0] == 0:
        return 0
    if not sub.any(axis=1).all():
        raise ValueError("every row needs at least one column")
    g = nx.DiGraph()
    for j in range(sub.shape[1]):
        g.add_edge(("in", j), ("out", j), capacity=1)
    for row in sub:
        seq = np.flatnonzero(row).tolist()
        g.add_edge("s", ("in", seq[0]))
        for a, b in zip(seq, seq[1:]):
            g.add_edge(("out", a), ("in", b))
        g.add_edge(("out", seq[-1]), "t")
    return int(nx.maximum_flow_value(g, "s", "t"))


def _log_cover_probability(profile: CutProfile, p: float) -> float:
    """log Pr(each column independently chosen w.p. p hits every row)."""
    if profile.r is None:
        return -math.inf
    m = profile.m
    lp, lq = math.log(p), math.log1p(-p)
    terms = [math.log(c) + i * lp + (m - i) * lq
             for i, c in enumerate(profile.counts) if c]
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def observation_likelihoods(part: Partition, p: float,
                            budget: int = DEFAULT_BUDGET) -> LikelihoodPair:
    """Likelihood of the observed contents under ``m0 = 1`` and ``m0 = 0``.

    Under ``m0 = 1`` every relay on a content-1 path is honest, and the Type 0
    relays alone must compromise all content-0 paths; symmetrically for
    ``m0 = 0``.  Unanimous observations are handled too (the opposite side
    then has no rows).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    prof0 = cut_profile(part.b0, budget=budget)
    prof1 = cut_profile(part.b1, budget=budget)
    lq = math.log1p(-p)
    log_one = (part.n - part.n0) * lq + _log_cover_probability(prof0, p)
    log_zero = (part.n - part.n1) * lq + _log_cover_probability(prof1, p)
    return LikelihoodPair(log_one, log_zero, prof0, prof1)


def conditional_likelihoods(part: Partition, p: float,
                            budget: int = DEFAULT_BUDGET) -> LikelihoodPair:
    if not part.conflicting:
        raise NotConflicting(f"k1={part.k1} of k={part.k}: contents agree")
    return observation_likelihoods(part, p, budget)


def brute_force_conditional(ps: PathSystem, p: float, m0: int, limit: int = 20) -> float:
    """Exact Pr(observed contents | m0) by summing over every malicious subset."""
    n = ps.n
    if n > limit:
        raise TooLarge(f"{n} relays exceeds brute-force limit {limit}")
    if ps.direct and ps.direct[0] != m0:
        return 0.0
    col = {v: j for j, v in enumerate(ps.vehicle_ids)}
    path_masks = [sum(1 << col[v] for v in path) for path in ps.paths]
    flipped = [c != m0 for c in ps.contents]
    total = 0.0
    for s in range(1 << n):
        if all(bool(pm & s) == f for pm, f in zip(path_masks, flipped)):
            bad = bin(s).count("1")
            total += p**bad * (1 - p) ** (n - bad)
    return total
