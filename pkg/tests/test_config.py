import pytest

from choralegen.config import RunConfig, parse_run_config
from choralegen.errors import ConfigError


def test_defaults():
    config = parse_run_config("")
    assert config == RunConfig()
    assert config.threshold == 0.9
    assert config.target_mse == 0.01


def test_parse_overrides():
    config = parse_run_config("""
    # training setup
    num_blocks = 16
    optimizer = gd
    learning_rate = 0.5
    target_mse = 0.002
    """)
    assert config.num_blocks == 16
    assert config.optimizer == "gd"
    assert config.optimizer_config().learning_rate == 0.5
    assert config.train_config().target_mse == 0.002


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_run_config("learning_rte = 0.1")


def test_bad_value_rejected():
    with pytest.raises(ConfigError):
        parse_run_config("max_epochs = soon")


def test_missing_equals_rejected():
    with pytest.raises(ConfigError):
        parse_run_config("just a line")


def test_builders_cover_all_sections():
    config = RunConfig(seed=9, num_blocks=5, truncation_window=8, gen_steps=3)
    assert config.network_config().rng_seed == 9
    assert config.network_config().num_blocks == 5
    assert config.optimizer_config().delta_zero == 0.1
    assert config.train_config().truncation_window == 8
    assert config.generation_config().num_steps == 3
    assert config.generation_config(num_steps=7).num_steps == 7


def test_truncation_zero_means_full_bptt():
    assert RunConfig(truncation_window=0).train_config().truncation_window is None
