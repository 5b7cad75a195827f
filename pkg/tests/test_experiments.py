import json
from fractions import Fraction

import pytest

from sensilab.errors import UsageError
from sensilab.experiments import (
    REGISTRY,
    coerce_params,
    diff_oracle_table,
    ip_oracle_table,
    run_experiment,
)


def test_registry_names():
    assert sorted(REGISTRY) == [
        "families-oracle",
        "gillis",
        "morse-strong-ft",
        "rotation-equicontinuous",
        "skew-example-522",
        "skew-ft-sensitive",
    ]


def test_unknown_experiment_and_param():
    with pytest.raises(UsageError):
        run_experiment("nope")
    with pytest.raises(UsageError):
        coerce_params("gillis", {"bogus": "1"})
    with pytest.raises(UsageError):
        coerce_params("gillis", {"trials": "many"})
    assert coerce_params("gillis", {"a": "0.3", "trials": "5"})["a"] == Fraction(3, 10)


def test_oracle_tables_small():
    seqs, best = ip_oracle_table(6, 2)
    # {1, 2} holds FS(1, 1) = {1, 2}
    assert seqs[best[0b110]] == (1, 1)
    assert best[0b10010] == -1  # {1, 4}
    seqs, best = diff_oracle_table(6, 3)
    assert seqs[best[0b101100]] == (0, 2, 5)  # {2, 3, 5}


def observation(report, label):
    for o in report.observations:
        if o["label"] == label:
            return o["value"]
    raise KeyError(label)


def test_morse_small():
    r = run_experiment("morse-strong-ft", {"s": "8", "window": "64", "forward": "64", "backward": "64"})
    assert r.verdict == "pass"
    assert observation(r, "divergence_set") == ",".join(map(str, range(8, 64))) + "@64"
    assert observation(r, "block_witness") == {"kind": "block", "start": 8, "length": 56}


def test_small_runs_pass():
    assert run_experiment("rotation-equicontinuous", {"trials": "30", "window": "200"}).verdict == "pass"
    assert run_experiment("skew-ft-sensitive", {"window": "5000", "block_target": "10"}).verdict == "pass"
    assert run_experiment("skew-example-522", {"samples": "3", "window": "500"}).verdict == "pass"
    assert run_experiment("families-oracle", {"limit": "8"}).verdict == "pass"
    assert run_experiment("gillis", {"trials": "5"}).verdict == "pass"


def test_unmet_target_fails():
    r = run_experiment("skew-ft-sensitive", {"window": "300", "block_target": "100000"})
    assert r.verdict == "fail"
    assert r.checks["block_target_met"] is False


def test_report_serialization_is_deterministic():
    a = run_experiment("gillis", {"trials": "4"}, seed=7)
    b = run_experiment("gillis", {"trials": "4"}, seed=7)
    assert a.to_json(timing=False) == b.to_json(timing=False)
    d = json.loads(a.to_json())
    assert d["report_version"] == 1
    assert set(d) == {
        "report_version", "experiment", "params", "observations", "verdict",
        "ambiguity_count", "seed", "runtime_ms", "version",
    }
    assert d["params"]["a"] == "3/10"
    assert d["params"]["eps"] == "1/100"
    assert isinstance(d["runtime_ms"], float)
