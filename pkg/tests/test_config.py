import pytest

from plantwatch.config import ConfigError, MarkerSet, TankSpec, load_config


def test_default_config_loads(cfg):
    assert set(cfg.tanks) == {"T101", "T301", "T401", "T601", "T602"}
    assert cfg.markers["T101"].h == 800
    assert cfg.pump_rates["P101"] == 2.5
    assert cfg.sa_window == 30
    assert cfg.sa_epsilon["T101"] == pytest.approx(1.3)
    assert cfg.rules_raw[1]
    assert "LIT301" in cfg.remote_tags[1]


def test_tank_validation():
    with pytest.raises(ConfigError):
        TankSpec("T101", alpha=0.0, dead_level=150, capacity=1200, initial=650)
    with pytest.raises(ConfigError):
        TankSpec("T101", alpha=0.25, dead_level=1300, capacity=1200, initial=650)


def test_marker_ordering_validation():
    with pytest.raises(ConfigError):
        MarkerSet("T101", ll=500, l=250, h=800, hh=1000)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/plant.ini")


def test_bad_value_wrapped(tmp_path):
    bad = tmp_path / "plant.ini"
    bad.write_text("[simulation]\nseed = banana\n")
    with pytest.raises(ConfigError):
        load_config(bad)
