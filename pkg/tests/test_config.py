from __future__ import annotations

import json

import pytest

from skelfix.config import Config, ConfigError, load_config


def test_defaults():
    cfg = Config()
    assert cfg.max_patches_per_bug == 200
    assert cfg.max_candidates_per_skeleton == 500
    assert cfg.max_mods_per_patch == 3
    assert cfg.sampling.top_p == 0.95
    assert cfg.sampling.temperature == 0.8
    assert cfg.budget.wall_clock_limit == 18000.0
    assert cfg.keep_going is False
    assert cfg.validation_workers == 1


def test_caps_follow_config():
    caps = Config(max_candidates_per_skeleton=7, max_mods_per_patch=2).caps
    assert caps.max_candidates_per_skeleton == 7
    assert caps.max_mods_per_patch == 2


@pytest.mark.parametrize("kwargs", [
    {"max_patches_per_bug": 0},
    {"max_candidates_per_skeleton": -1},
    {"max_mods_per_patch": 0},
    {"validation_workers": 0},
])
def test_invariants(kwargs):
    with pytest.raises(ConfigError):
        Config(**kwargs)


@pytest.mark.parametrize("overrides", [
    {"sampling": {"top_p": 0.0}},
    {"sampling": {"top_p": 1.5}},
    {"sampling": {"temperature": -0.1}},
    {"budget": {"per_test_timeout": 0}},
    {"budget": {"wall_clock_limit": -1}},
    {"budget": {"bogus": 1}},
    {"nonsense": 3},
    {"budget": 5},
])
def test_merged_rejects_bad_values(overrides):
    with pytest.raises(ConfigError):
        Config().merged(overrides)


def test_merged_ignores_none_and_keeps_nested_defaults():
    cfg = Config().merged({"keep_going": None, "budget": {"per_test_timeout": 9}})
    assert cfg.keep_going is False
    assert cfg.budget.per_test_timeout == 9
    assert cfg.budget.wall_clock_limit == 18000.0


def test_load_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"max_mods_per_patch": 2, "test_command": "make test",
                                "sampling": {"temperature": 0.2}}))
    cfg = load_config(path)
    assert cfg.max_mods_per_patch == 2
    assert cfg.test_command == "make test"
    assert cfg.sampling.temperature == 0.2
    assert cfg.sampling.top_p == 0.95


def test_load_config_errors(tmp_path):
    assert load_config(None) == Config()
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(bad)
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_to_json_round_trips(tmp_path):
    cfg = Config(max_mods_per_patch=2, test_command="x")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_json()))
    assert load_config(path) == cfg
