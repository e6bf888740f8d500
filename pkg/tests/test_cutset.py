import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CROSSED, as_copies
from topodecide.cutset import (CutProfile, brute_force_conditional, conditional_likelihoods,
                               covers, cut_profile, min_cut_lower_bound, observation_likelihoods)
from topodecide.errors import NotConflicting, SizeLimit, TooLarge
from topodecide.topology import MessageCopy, build_path_system, partition


def naive_counts(sub):
    """Count covering column subsets of every size by plain enumeration."""
    sub = np.asarray(sub, dtype=bool)
    m = sub.shape[1]
    return [sum(covers(c, sub) for c in combinations(range(m), i)) for i in range(m + 1)]


def matrix(rows, m):
    out = np.zeros((len(rows), m), dtype=bool)
    for i, row in enumerate(rows):
        out[i, list(row)] = True
    return out


@pytest.fixture
def crossed_part(crossed):
    return partition(build_path_system(crossed))


def test_covers_crossed_b0(crossed_part):
    b0 = crossed_part.b0  # columns V2, V5, V6
    assert covers({0}, b0) == 1
    assert covers({1}, b0) == 0
    assert covers(set(), b0) == 0


def test_crossed_profiles(crossed_part):
    p0 = cut_profile(crossed_part.b0)
    assert p0.counts == (0, 1, 3, 1) and p0.r == 1 and p0.count_at_r == 1
    p1 = cut_profile(crossed_part.b1)
    assert p1.counts == (0, 0, 4, 4, 1) and p1.r == 2 and p1.count_at_r == 4


def test_stop_at_r_keeps_minimum(crossed_part):
    full = cut_profile(crossed_part.b1)
    short = cut_profile(crossed_part.b1, stop_at_r=True)
    assert (short.r, short.count_at_r) == (full.r, full.count_at_r)
    assert not short.complete


def test_single_row_is_binomial():
    prof = cut_profile(np.ones((1, 6), dtype=bool))
    assert prof.counts == (0,) + tuple(math.comb(6, i) for i in range(1, 7))
    assert prof.r == 1


def test_min_cut_fixtures(crossed_part, disjoint7):
    assert min_cut_lower_bound(crossed_part.b0) == 1
    assert min_cut_lower_bound(partition(build_path_system(disjoint7)).b0) == 4
    assert min_cut_lower_bound(np.ones((1, 5), dtype=bool)) == 1


def test_min_cut_can_exceed_hitting_set():
    # rows {0,1},{0,3},{2},{0,2},{1,2,3}: {0,2} hits every row, yet the union
    # graph built by chaining rows has three vertex-disjoint routes
    sub = matrix([(0, 1), (0, 3), (2,), (0, 2), (1, 2, 3)], 4)
    assert cut_profile(sub).r == 2
    assert min_cut_lower_bound(sub) == 3


def test_min_cut_equals_r_on_disjoint_paths():
    for sizes in [(3,), (2, 2), (1, 4, 2), (6, 6, 6, 6)]:
        start = np.cumsum((0,) + sizes[:-1])
        sub = matrix([range(s, s + n) for s, n in zip(start, sizes)], sum(sizes))
        assert min_cut_lower_bound(sub) == cut_profile(sub).r == len(sizes)


def test_size_limit():
    rng = np.random.default_rng(0)
    sub = rng.random((30, 60)) < 0.15
    sub[np.arange(30), rng.integers(0, 60, 30)] = True
    with pytest.raises(SizeLimit):
        cut_profile(sub, budget=1000)


def test_disjoint7_closed_forms(disjoint7):
    part = partition(build_path_system(disjoint7))
    for p in (0.01, 0.05, 0.092, 0.2, 0.5):
        q = 1 - p
        lik = conditional_likelihoods(part, p)
        assert lik.given_one == pytest.approx(q**24 * (1 - q**6) ** 4, rel=1e-12)
        assert lik.given_zero == pytest.approx(q**24 * p * (1 - q**8) * (1 - q**15), rel=1e-12)


def test_crossed_matches_brute_force(crossed):
    ps = build_path_system(crossed)
    lik = conditional_likelihoods(partition(ps), 0.1)
    assert lik.given_one == pytest.approx(brute_force_conditional(ps, 0.1, 1), rel=1e-12)
    assert lik.given_zero == pytest.approx(brute_force_conditional(ps, 0.1, 0), rel=1e-12)


def test_no_exclusive_relays_gives_zero():
    # every content-0 relay is shared, so m0 = 1 cannot explain the 0 copies
    ps = build_path_system(as_copies([((1, 2), 1), ((2,), 0)]))
    assert partition(ps).n0 == 0
    assert brute_force_conditional(ps, 0.2, 1) == 0.0
    assert conditional_likelihoods(partition(ps), 0.2).given_one == 0.0


def test_unanimous_brute_force():
    ps = build_path_system(as_copies([((1, 2), 0), ((2, 3, 4), 0)]))
    assert brute_force_conditional(ps, 0.3, 0) == pytest.approx(0.7**4)
    with pytest.raises(NotConflicting):
        conditional_likelihoods(partition(ps), 0.3)
    assert observation_likelihoods(partition(ps), 0.3).given_zero == pytest.approx(0.7**4)


def test_brute_force_limit():
    ps = build_path_system([MessageCopy(1, tuple(range(1, 23))), MessageCopy(0, (30,))])
    with pytest.raises(TooLarge):
        brute_force_conditional(ps, 0.1, 1)


def test_likelihood_vanishes_as_p_shrinks(crossed):
    part = partition(build_path_system(crossed))
    vals = [conditional_likelihoods(part, p).given_one for p in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-5


rows_st = st.integers(1, 8).flatmap(
    lambda m: st.lists(
        st.lists(st.integers(0, m - 1), min_size=1, max_size=m, unique=True),
        min_size=1, max_size=6,
    ).map(lambda rows: matrix(rows, m))
)


@given(rows_st)
def test_profile_matches_enumeration(sub):
    prof = cut_profile(sub)
    assert list(prof.counts) == naive_counts(sub)
    nonzero = [i for i, c in enumerate(prof.counts) if c]
    assert prof.r == nonzero[0]


@given(rows_st)
def test_support_is_monotone(sub):
    counts = cut_profile(sub).counts
    for i in range(len(counts) - 1):
        if counts[i]:
            assert counts[i + 1]


instance_st = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.lists(st.lists(st.integers(1, n), min_size=1, max_size=n, unique=True).map(tuple),
                 min_size=2, max_size=6, unique=True),
        st.sampled_from([0.05, 0.1, 0.3]),
        st.randoms(use_true_random=False),
    )
)


@settings(max_examples=200, deadline=None)
@given(instance_st)
def test_closed_form_matches_brute_force(instance):
    paths, p, rnd = instance
    contents = [0, 1] + [rnd.randint(0, 1) for _ in paths[2:]]
    ps = build_path_system(MessageCopy(c, path) for c, path in zip(contents, paths))
    lik = conditional_likelihoods(partition(ps), p)
    for m0, got in ((1, lik.given_one), (0, lik.given_zero)):
        want = brute_force_conditional(ps, p, m0)
        assert got == pytest.approx(want, rel=1e-12, abs=0)
