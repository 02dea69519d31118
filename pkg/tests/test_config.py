import pytest

from stretchchaos.config import (
    DEFAULT_CONFIG_PATH,
    DEFAULTS,
    RunConfig,
    load_config,
    load_params_file,
    parse_params_text,
)
from stretchchaos.errors import ConfigError
from stretchchaos.orbits import NewtonSettings
from stretchchaos.pipelines import ORBIT_MODELS, PIPELINES


def test_missing_config_file_gives_defaults(tmp_path):
    config = load_config(tmp_path / "absent.yaml")
    assert config == DEFAULTS
    assert config is not DEFAULTS


def test_partial_config_is_completed(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("paths:\n  n_paths: 10\nmodels:\n  logistic:\n    mu: 5.0\n")
    config = load_config(path)
    assert config["paths"] == {"n_paths": 10, "n_samples": 512, "seed": 0}
    assert config["models"]["logistic"]["mu"] == 5.0
    assert config["models"]["olg2d"]["K"] == 6.0
    assert config["tolerances"]["flow_orbit"] == 1e-6


@pytest.mark.parametrize("text", ["- a\n- b\n", "paths: [1, 2\n", "paths: 3\n"])
def test_malformed_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_params_text():
    text = "# OLG\nmodel olg2d\nmu = 70   # lower\nb=3\n\nmodel duopoly\nalpha = 0.9629\n"
    assert parse_params_text(text) == {"olg2d": {"mu": 70.0, "b": 3.0}, "duopoly": {"alpha": 0.9629}}


@pytest.mark.parametrize("text", ["mu = 1\n", "model\n", "model olg2d\nmu 1\n", "model olg2d\nmu = x\n"])
def test_params_text_errors(text):
    with pytest.raises(ConfigError):
        parse_params_text(text)


def test_unreadable_params_file(tmp_path):
    with pytest.raises(ConfigError):
        load_params_file(tmp_path / "missing.txt")


def test_run_config_merges_flags_over_the_file():
    run = RunConfig.build(DEFAULTS, "verify", "olg2d", overrides={"K": 5.5, "mu": None},
                          n_paths=12, tol=1e-7, seed=None)
    assert run.params == {"mu": 80.0, "b": 2.0, "beta": 1.3, "K": 5.5}
    assert run.n_paths == 12
    assert run.seed == 0
    assert run.tolerances["stretch"] == 1e-7
    assert run.to_dict()["model"] == "olg2d"
    assert DEFAULTS["tolerances"]["stretch"] is None


def test_shipped_config_matches_the_defaults():
    assert load_config(DEFAULT_CONFIG_PATH) == DEFAULTS


def test_every_model_section_has_a_command():
    assert set(DEFAULTS["models"]) <= set(PIPELINES) | set(ORBIT_MODELS)
    assert set(DEFAULTS["output"]) == {"directory", "plots"}


def test_orbit_settings_reach_the_newton_search():
    settings = NewtonSettings.from_mapping(DEFAULTS["orbits"]).to_dict()
    for key, value in DEFAULTS["orbits"].items():
        if key != "max_period":
            assert settings[key] == value
