import json
import math
import time
from pathlib import Path

import pytest

from areatrap import harness
from areatrap.errors import InvalidInput, InvalidParameter
from areatrap.harness import (
    CSV_HEADER,
    ExperimentConfig,
    cloud_for,
    read_results,
    run_trial,
    sweep,
)

MINI = Path(__file__).resolve().parents[1] / "configs" / "mini.json"


def _cfg(**over):
    d = {"master_seed": 7, "n_values": [10], "alpha_values": [0.1], "replicates": 1}
    d.update(over)
    return ExperimentConfig.from_dict(d)


def test_load_mini():
    cfg = ExperimentConfig.load(MINI)
    assert cfg.trial_count == 12
    assert cfg.replicates == (3, 3)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("bad", [
    {"colour": "red"},
    {"solver": {"mode": "exact", "speed": 3}},
    {"outputs": {"log": "x"}},
    {"n_values": [15, 10]},
    {"n_values": []},
    {"alpha_values": [0.5]},
    {"alpha_values": [0.1, 0.1]},
    {"replicates": 0},
    {"master_seed": -1},
    {"master_seed": True},
    {"threads": 0},
    {"threads": "many"},
    {"epsilon": 0},
    {"hausdorff_ds": 0},
    {"delta": 1.0},
])
def test_config_rejects(bad):
    with pytest.raises((InvalidInput, InvalidParameter)):
        _cfg(**bad)


def test_config_missing_key():
    with pytest.raises(InvalidInput):
        ExperimentConfig.from_dict({"master_seed": 1, "n_values": [3], "alpha_values": [0.1]})


def test_config_non_finite(tmp_path):
    f = tmp_path / "c.json"
    f.write_text('{"master_seed": 1, "n_values": [NaN], "alpha_values": [0.1], "replicates": 1}')
    with pytest.raises(InvalidInput):
        ExperimentConfig.load(f)


def test_thread_precedence(monkeypatch):
    cfg = _cfg(threads=3)
    monkeypatch.delenv(harness.THREADS_ENV, raising=False)
    assert cfg.resolve_threads() == 3
    monkeypatch.setenv(harness.THREADS_ENV, "5")
    assert cfg.resolve_threads() == 5
    assert cfg.resolve_threads(2) == 2
    monkeypatch.setenv(harness.THREADS_ENV, "x")
    with pytest.raises(InvalidParameter):
        cfg.resolve_threads()


def test_index_round_trip():
    cfg = _cfg(n_values=[5, 8, 12], alpha_values=[0.1, 0.2], replicates=[2, 3, 1])
    seen = set()
    for i in range(cfg.trial_count):
        n, a, r = cfg.locate(i)
        key = (cfg.n_values.index(n), cfg.alpha_values.index(a), r)
        assert cfg.index_of(*key) == i
        seen.add(key)
    assert len(seen) == cfg.trial_count
    with pytest.raises(InvalidParameter):
        cfg.locate(cfg.trial_count)


def test_cloud_shared_across_alpha():
    cfg = _cfg(alpha_values=[0.1, 0.3], replicates=2)
    assert cloud_for(cfg, 0) == cloud_for(cfg, 2)
    assert cloud_for(cfg, 0) != cloud_for(cfg, 1)
    # adding alpha values leaves existing clouds alone
    wider = _cfg(alpha_values=[0.1, 0.2, 0.3], replicates=2)
    assert cloud_for(wider, 0) == cloud_for(cfg, 0)


def test_trial_determinism():
    cfg = _cfg(record_timing=True)
    a, b = run_trial(cfg, 0), run_trial(cfg, 0)
    assert a.without_timing() == b.without_timing()
    assert a.wall_ms is not None


def test_smoke_trial_fast():
    cfg = _cfg(n_values=[20], alpha_values=[0.05])
    t0 = time.perf_counter()
    rec = run_trial(cfg, 0)
    assert time.perf_counter() - t0 < 1.0
    assert rec.status == "solved"
    assert rec.achieved_area_ratio >= 0.55
    assert rec.L_alpha <= rec.L_unconstrained


def test_high_alpha_small_n_graceful():
    cfg = _cfg(alpha_values=[0.49], replicates=5)
    for i in range(5):
        rec = run_trial(cfg, i)
        assert rec.status in ("solved", "infeasible")
        if rec.status == "infeasible":
            assert rec.L_alpha is None and rec.mfl_all is None
        else:
            assert rec.achieved_area_ratio >= 0.99


def test_mini_sweep(tmp_path):
    cfg = ExperimentConfig.load(MINI)
    out = sweep(cfg, tmp_path / "r.csv")
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 13
    assert not (tmp_path / "r.csv.incomplete").exists()
    rows = read_results(out)
    keys = [(r["n"], r["alpha"], r["trial_index"]) for r in rows]
    assert keys == sorted(keys)
    for r in rows:
        if r["status"] == "solved":
            assert r["achieved_area_ratio"] >= 0.5 + r["alpha"]
            assert r["L_alpha"] <= r["L_unconstrained"]
        assert r["wall_ms"] is None


def test_sweep_bytes_independent_of_threads(tmp_path):
    cfg = ExperimentConfig.load(MINI)
    a = sweep(cfg, tmp_path / "a.csv", threads=1).read_bytes()
    b = sweep(cfg, tmp_path / "b.csv", threads=8).read_bytes()
    c = sweep(cfg, tmp_path / "c.csv", threads=3).read_bytes()
    assert a == b == c


def test_interrupted_sweep_leaves_marker(tmp_path, monkeypatch):
    cfg = ExperimentConfig.load(MINI)
    real = harness._run_group
    calls = {"k": 0}

    def crashing(config, n_pos, rep):
        calls["k"] += 1
        if calls["k"] == 4:
            raise KeyboardInterrupt("injected")
        return real(config, n_pos, rep)

    monkeypatch.setattr(harness, "_run_group", crashing)
    out = tmp_path / "r.csv"
    with pytest.raises(KeyboardInterrupt):
        sweep(cfg, out, threads=1)
    assert (tmp_path / "r.csv.incomplete").exists()
    rows = read_results(out)  # a valid prefix
    assert 0 < len(rows) < 12
    monkeypatch.setattr(harness, "_run_group", real)
    full = read_results(sweep(cfg, tmp_path / "full.csv", threads=1))
    assert rows == full[:len(rows)]


def test_unwritable_output_fails_before_compute(tmp_path, monkeypatch):
    cfg = ExperimentConfig.load(MINI)

    def boom(*a, **k):
        raise AssertionError("compute started")

    monkeypatch.setattr(harness, "_run_group", boom)
    with pytest.raises(OSError):
        sweep(cfg, tmp_path / "missing_dir" / "r.csv")


def test_read_results_rejects_bad_header(tmp_path):
    f = tmp_path / "r.csv"
    f.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInput):
        read_results(f)
