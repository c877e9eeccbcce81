"""Experiment harness: config schema, trial streams, report determinism."""

import json

import pytest

from orelearn.harness import (
    CSV_SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    derive_trial_rng,
    run,
)


def _cfg(**kw):
    return ExperimentConfig.from_dict(kw)


# -- config schema ------------------------------------------------------------


def test_unknown_key_rejected_with_field_name():
    with pytest.raises(ConfigError) as err:
        _cfg(experiment="pac", bogus_knob=1)
    assert err.value.field_path == "bogus_knob"


def test_missing_experiment_rejected():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict({"ell": 8})
    assert err.value.field_path == "experiment"


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigError):
        _cfg(experiment="nope")


def test_unknown_mode_rejected_naming_field():
    with pytest.raises(ConfigError) as err:
        _cfg(experiment="games", mode="telepathy")
    assert err.value.field_path == "mode"


def test_soundness_requires_drop_index():
    with pytest.raises(ConfigError) as err:
        _cfg(experiment="trace", mode="soundness", n=10)
    assert err.value.field_path == "drop_index"
    _cfg(experiment="trace", mode="soundness", n=10, drop_index=10)
    with pytest.raises(ConfigError):
        _cfg(experiment="trace", mode="soundness", n=10, drop_index=11)


def test_hybrid_requires_vectors():
    with pytest.raises(ConfigError):
        _cfg(experiment="hybrid")
    _cfg(experiment="hybrid", left=[1, 2], right=[0, 3])


def test_range_validation():
    for bad in (
        {"ell": 0},
        {"ell": 65},
        {"alpha": 0.0},
        {"beta": 1.0},
        {"gamma": 0.6},
        {"xi": 0.0},
        {"trials": -1},
        {"scheme": "rot13"},
        {"certifier": "notary"},
        {"dist": "cauchy"},
        {"keyspace": "huge"},
    ):
        with pytest.raises(ConfigError):
            _cfg(experiment="pac", **bad)


def test_canonical_json_and_hash_stable():
    a = _cfg(experiment="pac", ell=12, seed=3)
    b = ExperimentConfig.from_dict(json.loads(a.canonical_json()) | {})
    assert a.canonical_json() == b.canonical_json()
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != _cfg(experiment="pac", ell=12, seed=4).config_hash()


# -- trial streams --------------------------------------------------------------


def test_trial_streams_differ_between_indices():
    a = derive_trial_rng(7, 0).bytes(32)
    b = derive_trial_rng(7, 1).bytes(32)
    assert a != b


def test_trial_streams_reproducible():
    assert derive_trial_rng(7, 3).bytes(32) == derive_trial_rng(7, 3).bytes(32)


def test_distinct_master_seeds_give_distinct_streams():
    seen = {bytes(derive_trial_rng(seed, 0).bytes(8)) for seed in range(1000)}
    assert len(seen) == 1000


def test_label_separates_streams():
    assert derive_trial_rng(7, 0, b"a").bytes(16) != derive_trial_rng(7, 0, b"b").bytes(16)


# -- reports ----------------------------------------------------------------------


def _small_configs():
    return [
        {"experiment": "correctness", "ell": 10, "trials": 150, "seed": 5},
        {"experiment": "pac", "ell": 12, "trials": 5, "seed": 5, "dist": "uniform"},
        {
            "experiment": "trace",
            "mode": "completeness",
            "ell": 24,
            "n": 8,
            "trials": 2,
            "seed": 5,
            "k_cap": 80,
        },
        {"experiment": "games", "mode": "synthetic", "trials": 4000, "seed": 5},
        {"experiment": "hybrid", "left": [1, 5, 9], "right": [2, 5, 8], "ell": 4},
        {"experiment": "sq", "ell": 8, "trials": 2, "seed": 5},
        {"experiment": "validsig", "mode": "learn", "ell": 64, "trials": 4, "seed": 5},
    ]


def test_rerun_reproduces_identical_csv_bodies():
    for raw in _small_configs():
        cfg = ExperimentConfig.from_dict(raw)
        r1, r2 = run(cfg), run(cfg)
        assert r1.csv_trials() == r2.csv_trials(), raw["experiment"]
        assert r1.csv_summary() == r2.csv_summary(), raw["experiment"]


def test_zero_trials_is_an_empty_success():
    report = run(ExperimentConfig.from_dict({"experiment": "pac", "ell": 10, "trials": 0}))
    assert report.rows == []
    assert report.passed is None


def test_csv_headers_are_versioned_and_pinned():
    assert CSV_SCHEMA_VERSION == "orelearn.csv.v1"
    cfg = ExperimentConfig.from_dict(
        {"experiment": "hybrid", "left": [1, 2], "right": [0, 3], "ell": 4}
    )
    report = run(cfg)
    lines = report.csv_trials().splitlines()
    assert lines[0].startswith("orelearn.csv.v1,config=")
    assert lines[1] == "index,vector"


_EXPECTED_COLUMNS = {
    "correctness": ["check", "class", "checked", "failures"],
    "pac": ["family", "trial", "n", "error", "good", "one_sided_ok", "hypothesis"],
    "trace": ["trial", "well_spaced", "error", "accused", "good_and_untraced"],
    "games": ["game", "trials", "advantage", "ci_lo", "ci_hi"],
    "hybrid": ["index", "vector"],
    "sq": ["trial", "queries", "recovered_t", "true_t", "error", "hypothesis"],
    "validsig": ["trial", "outcome", "detail"],
}


def test_per_experiment_columns_pinned():
    for raw in _small_configs():
        cfg = ExperimentConfig.from_dict(raw)
        report = run(cfg)
        assert report.columns == _EXPECTED_COLUMNS[cfg.experiment], cfg.experiment


def test_report_write_and_json_roundtrip(tmp_path):
    cfg = ExperimentConfig.from_dict(
        {"experiment": "hybrid", "left": [1, 5, 9], "right": [2, 5, 8], "ell": 4}
    )
    report = run(cfg)
    paths = report.write(tmp_path)
    names = sorted(p.name for p in paths)
    assert any(n.endswith(".json") for n in names)
    assert any(n.endswith("_trials.csv") for n in names)
    blob = json.loads((tmp_path / paths[0].name).read_text())
    assert blob["config_hash"] == cfg.config_hash()
    assert blob["passed"] is True
    assert blob["schema"] == CSV_SCHEMA_VERSION
