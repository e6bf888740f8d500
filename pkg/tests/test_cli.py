import io
import json

import pytest

from conftest import CROSSED, DISJOINT7, write_scenario
from topodecide import cli, cutset
from topodecide.cutset import LikelihoodPair


def run(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def parse(text):
    rows = {}
    for line in text.splitlines():
        fields = dict(kv.split("=", 1) for kv in line.split())
        if "algo" in fields:
            rows[fields["algo"]] = fields
    return rows


def test_decide_crossed(tmp_path):
    code, text = run("decide", write_scenario(tmp_path / "s.json", CROSSED), "--p", 0.1, "--seed", 1)
    assert code == 0 and text.endswith("status=ok\n")
    h = parse(text)["heuristic"]
    assert (h["d"], h["r0"], h["r1"]) == ("1", "1", "2")


@pytest.mark.parametrize("p,want", [(0.05, "0"), (0.2, "1")])
def test_decide_disjoint7(tmp_path, p, want):
    path = write_scenario(tmp_path / "s.json", DISJOINT7)
    code, text = run("decide", path, "--p", p, "--p1", 0.5, "--seed", 1, "--algo", "optimum")
    assert code == 0 and parse(text)["optimum"]["d"] == want


def test_decide_unanimous(tmp_path):
    path = write_scenario(tmp_path / "s.json", [((1, 2), 0), ((3,), 0)])
    code, text = run("decide", path, "--seed", 0)
    assert code == 0 and {r["d"] for r in parse(text).values()} == {"0"}


def test_decide_prints_seed_when_absent(tmp_path):
    code, text = run("decide", write_scenario(tmp_path / "s.json", CROSSED), "--p", 0.1)
    assert code == 0 and text.startswith("seed=")


def test_decide_pretty(tmp_path):
    code, text = run("decide", write_scenario(tmp_path / "s.json", CROSSED), "--p", 0.1,
                     "--seed", 1, "--pretty")
    assert code == 0 and "heuristic  d=1" in text


def test_decide_uses_scenario_values(tmp_path):
    path = write_scenario(tmp_path / "s.json", DISJOINT7, p=0.2, p1=0.5)
    assert parse(run("decide", path, "--seed", 1)[1])["optimum"]["d"] == "1"
    assert parse(run("decide", path, "--seed", 1, "--p", 0.05)[1])["optimum"]["d"] == "0"


@pytest.mark.parametrize("content", ["{", '{"copies": 3}', '{"copies": []}',
                                     '{"copies": [{"content": 2, "path": [1]}]}'])
def test_decide_malformed(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert run("decide", path, "--p", 0.1, "--seed", 0)[0] == 2


def test_decide_bad_flags(tmp_path):
    path = write_scenario(tmp_path / "s.json", CROSSED)
    assert run("decide", path, "--p", 1.5, "--seed", 0)[0] == 2
    assert run("decide", path, "--seed", 0)[0] == 2  # optimum needs p


def test_decide_inconsistent(tmp_path):
    path = write_scenario(tmp_path / "s.json", [((1, 2), 1), ((1,), 0), ((2,), 0)])
    assert run("decide", path, "--p", 0.1, "--seed", 0, "--algo", "optimum")[0] == 3


def test_oracle_small():
    code, text = run("oracle", "--max-n", 2, "--seed", 0)
    assert code == 0 and text.endswith("status=ok\n")


def test_oracle_catches_fault(monkeypatch):
    real = cutset.conditional_likelihoods

    def broken(part, p, budget=cutset.DEFAULT_BUDGET):
        lik = real(part, p, budget)
        return LikelihoodPair(lik.log_one + 1e-9, lik.log_zero, lik.profile0, lik.profile1)

    monkeypatch.setattr(cutset, "conditional_likelihoods", broken)
    code, text = run("oracle", "--cases", 20, "--seed", 0)
    assert code == 1
    dump = json.loads(text.split("instance=", 1)[1].splitlines()[0])
    assert {"p", "copies"} <= set(dump)


def test_ratio_disjoint7(tmp_path):
    code, text = run("ratio", write_scenario(tmp_path / "s.json", DISJOINT7),
                     "--p-min", 0.05, "--p-max", 0.5, "--steps", 9)
    lines = text.splitlines()
    assert code == 0 and lines[0] == "p,f1,f2,ratio" and lines[-1] == "status=ok"
    row = dict(zip(lines[0].split(","), map(float, lines[-3].split(","))))
    assert row["p"] == 0.5
    # f1 is the full likelihood given m0 = 1: 0.5^24 * (1 - 0.5^6)^4
    assert row["f1"] == pytest.approx(0.5**24 * 0.984375**4, rel=1e-9)
    assert lines[-2].startswith("p_th=0.093")


def test_ratio_needs_conflict(tmp_path):
    path = write_scenario(tmp_path / "s.json", [((1,), 1), ((2,), 1)])
    assert run("ratio", path)[0] == 3


def _base_config(tmp_path, **kw):
    path = tmp_path / "base.json"
    path.write_text(json.dumps({"rho": 0.01, "dist": 1200.0, "wait": 0.02, **kw}))
    return path


def test_sweep_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rho": -1}')
    assert run("sweep", "--config", bad, "--vary", "p", "--grid", "0.1",
               "--out", tmp_path / "o.csv")[0] == 2
    good = _base_config(tmp_path)
    assert run("sweep", "--config", good, "--vary", "p", "--grid", "0.1,x",
               "--out", tmp_path / "o.csv")[0] == 2


def test_dumped_trials_replay_through_decide(tmp_path):
    cfg = _base_config(tmp_path, p1=0.3)
    dump = tmp_path / "trials.jsonl"
    code, _ = run("sweep", "--config", cfg, "--vary", "p", "--grid", "0.1,0.3", "--trials", 15,
                  "--seed", 4, "--out", tmp_path / "o.csv", "--dump-trials", dump)
    assert code == 0
    records = [json.loads(line) for line in dump.read_text().splitlines()]
    assert len(records) == 2 * 15 * 2
    for i, rec in enumerate(records):
        scen = tmp_path / f"t{i}.json"
        scen.write_text(json.dumps(rec))
        code, text = run("decide", scen, "--seed", rec["seed"])
        assert code == 0
        got = {a: int(r["d"]) for a, r in parse(text).items()}
        assert got == rec["verdicts"], rec
