import pytest

from sdsn_automl.config import ConfigError, ScenarioConfig, load_baseline, load_scenario
from conftest import BASELINE, SCENARIO


def write(tmp_path, text):
    p = tmp_path / "c.yaml"
    p.write_text(text)
    return p


def test_shipped_configs_load():
    cfg = load_scenario(SCENARIO)
    assert cfg.defense.mode == "automl"
    assert cfg.attack_window == (20.0, 80.0)
    assert cfg.topology.target.capacity_pps < cfg.topology.access.capacity_pps
    assert load_baseline(BASELINE).seed == 2021


def test_overrides_use_dotted_paths():
    cfg = load_scenario(SCENARIO, {"seed": 9, "defense.mode": "none", "automl.buffer_s": 300})
    assert (cfg.seed, cfg.defense.mode, cfg.automl.buffer_s) == (9, "none", 300.0)


@pytest.mark.parametrize("text, path", [
    ("defense: {mode: firewall}", "defense.mode"),
    ("automl: {buffer_s: 30}", "automl.buffer_s"),
    ("topology: {target: {capacity_pps: fast}}", "topology.target.capacity_pps"),
    ("attacks: [{target: h1, bots: [h3], speed: warp}]", "attacks[0].speed"),
    ("attacks: [{target: h1, bots: [h3], start_s: 5, stop_s: 500}]", "attacks[0]"),
    ("probe: {colour: red}", "probe.colour"),
    ("automl: {bootstrap: {source: dir}}", "automl.bootstrap.datasets_dir"),
    ("automl: {algorithms: [xgboost]}", "automl.algorithms"),
    ("seed: -1", "seed"),
])
def test_errors_name_the_field(tmp_path, text, path):
    with pytest.raises(ConfigError) as err:
        load_scenario(write(tmp_path, text))
    assert str(err.value).startswith(path)


def test_yaml_syntax_error(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(write(tmp_path, "defense: [unclosed"))


def test_baseline_validation_surfaces_as_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_baseline(write(tmp_path, "baseline: {attack_speed: warp}"))


def test_defaults_are_valid():
    ScenarioConfig().validate()
