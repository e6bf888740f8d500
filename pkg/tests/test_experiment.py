import math

import numpy as np
import pytest

from topodecide.decision import (RULES, decision_probabilities, exact_psucc, observation_table,
                                 rule_decider)
from topodecide.experiment import (SweepSpec, estimate_psucc, monte_carlo_fixed, sweep,
                                   wilson_halfwidth)
from topodecide.netsim import ScenarioConfig

BASE = ScenarioConfig(rho=0.01, dist=1200.0, wait=0.02)


def test_wilson():
    assert wilson_halfwidth(0.5, 100) == pytest.approx(0.0964, abs=1e-3)
    assert 0 < wilson_halfwidth(1.0, 100) < 0.04


def test_no_attackers_always_right():
    est = estimate_psucc(ScenarioConfig(p=0.0, dist=1200.0), trials=40, seed=1)
    assert all(v == 1.0 for v in est.psucc.values())
    assert est.valid == 40


def test_all_attackers_always_wrong():
    est = estimate_psucc(ScenarioConfig(p=1.0, dist=1200.0), ("heuristic",), trials=200,
                         seed=2, mode="prior")
    assert est.psucc["heuristic"] == 0.0


def test_estimate_is_deterministic():
    a = estimate_psucc(BASE, trials=60, seed=5)
    b = estimate_psucc(BASE, trials=60, seed=5)
    assert a == b
    assert a.mean_k >= 1 and 0.0 <= a.discard_rate < 1.0


def test_optimum_dominates_paired():
    est = estimate_psucc(ScenarioConfig(p=0.05), ("optimum", "heuristic"), trials=300, seed=3)
    assert est.psucc["optimum"] >= est.psucc["heuristic"] - est.ci95["heuristic"]


def test_sweep_csv_is_deterministic(tmp_path):
    spec = SweepSpec(BASE, "p", (0.05, 0.2), trials=30)
    a, b = sweep(spec).to_csv(), sweep(spec).to_csv()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "vary,value,algorithm,psucc,ci95,discard_rate,mean_k,mean_n,trials,seed"
    assert len(lines) == 1 + 2 * len(RULES) and "\r" not in a


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        SweepSpec(BASE, "p", (0.1, 1.5))
    with pytest.raises(ValueError):
        SweepSpec(BASE, "speed", (1.0,))
    with pytest.raises(ValueError):
        SweepSpec(BASE, "p", ())


def test_monte_carlo_converges_to_exact():
    paths = [(1, 2), (2, 3), (4,), (3, 5, 6)]
    p, p1, n = 0.2, 0.3, 20_000
    table = observation_table(paths, p, p1)
    mc = monte_carlo_fixed(paths, p, p1, trials=n, seed=8)
    for rule in RULES:
        exact = exact_psucc(table, decision_probabilities(paths, table, rule_decider(rule, p, p1)))
        se = math.sqrt(exact * (1 - exact) / n)
        assert abs(mc[rule] - exact) <= 3 * se, rule
