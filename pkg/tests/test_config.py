import pytest
from pydantic import ValidationError

from src.core.schemas import (
    DEFAULT_CONFIG_PATH,
    SEED_ENV_VAR,
    ClusterConfig,
    env_seed,
    flatten_config,
    load_config,
    resolve_config,
    tracking_settings,
)


def test_defaults():
    config = ClusterConfig()
    assert (config.kappa, config.xi, config.tau, config.max_iter) == (50, 50, 10, 30)
    assert config.mode == "boost"
    assert not config.warm_start


@pytest.mark.parametrize(
    "field, value",
    [("k", 0), ("kappa", 0), ("xi", 1), ("tau", 0), ("max_iter", 0), ("seed", -1)],
)
def test_out_of_range_values(field, value):
    with pytest.raises(ValidationError):
        ClusterConfig(**{field: value})


def test_unknown_fields_and_modes_are_rejected():
    with pytest.raises(ValidationError):
        ClusterConfig(kapa=3)
    with pytest.raises(ValidationError):
        ClusterConfig(mode="fast")


def test_config_is_frozen_and_updates_validate():
    config = ClusterConfig(k=4)
    with pytest.raises(ValidationError):
        config.k = 5
    assert config.with_updates(k=9).k == 9
    with pytest.raises(ValidationError):
        config.with_updates(xi=0)


def test_k_larger_than_n():
    with pytest.raises(ValueError):
        ClusterConfig(k=11).check_against(10)
    ClusterConfig(k=10).check_against(10)


def test_shipped_yaml_resolves(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    flat = flatten_config(load_config(DEFAULT_CONFIG_PATH))
    assert flat["k"] == 100
    assert "name" not in flat
    config = resolve_config()
    assert config.k == 100 and config.kappa == 50
    experiment, run_name = tracking_settings()
    assert experiment
    assert run_name is None


def test_precedence(tmp_path, monkeypatch):
    path = tmp_path / "cfg.yaml"
    path.write_text("clustering:\n  k: 7\n  seed: 3\ngraph:\n  kappa: 12\n")

    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    config = resolve_config(path)
    assert (config.k, config.seed, config.kappa, config.xi) == (7, 3, 12, 50)

    monkeypatch.setenv(SEED_ENV_VAR, "42")
    assert resolve_config(path).seed == 42
    assert resolve_config(path, {"seed": 5, "k": None}).seed == 5
    assert resolve_config(path, {"seed": 5, "k": None}).k == 7


def test_bad_seed_variable(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "abc")
    with pytest.raises(ValueError):
        env_seed()
    monkeypatch.setenv(SEED_ENV_VAR, "")
    assert env_seed(8) == 8


def test_missing_yaml_gives_no_tracking_names(tmp_path):
    assert tracking_settings(tmp_path / "absent.yaml") == (None, None)
