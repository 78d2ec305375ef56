from importlib import resources

from plantwatch.attacks import load_scenario
from plantwatch.harness import (calibrate, export_run, invariant_profile_for_year,
                                replay, run_scenario)


def demo_scenario():
    return load_scenario(
        resources.files("plantwatch") / "data" / "scenarios" / "dry-run.toml")


def test_profile_for_year():
    assert invariant_profile_for_year(2016) == "v2016"
    assert invariant_profile_for_year(2017) == "v2017"


def test_run_scenario_outcome():
    outcome = run_scenario(demo_scenario())
    assert outcome.verdicts == {"plc": True, "historian": True}
    assert outcome.deviations == []
    first = outcome.first_alarm("plc")
    assert first is not None and first.name == "t101"


def test_catalog_report_aggregates(catalog_2017):
    assert len(catalog_2017.outcomes) == 31
    assert catalog_2017.deviations == []
    table = catalog_2017.by_category()
    assert sum(row["total"] for row in table.values()) == 31


def test_catalog_2016_has_no_historian_expectations(catalog_2016):
    assert all(o.expected["historian"] is None for o in catalog_2016.outcomes)
    assert catalog_2016.deviations == []


def test_calibration_clean_and_under_threshold():
    cal = calibrate(ticks=4000)
    assert cal.false_alarms == {"plc": 0, "historian": 0}
    for tank, peak in cal.peaks.items():
        assert 0.0 < peak < cal.thresholds[tank]


def test_export_then_replay_matches_online_alarms(tmp_path):
    outcome = run_scenario(demo_scenario())
    path = tmp_path / "hist.csv"
    export_run(outcome.result, path)
    replayed = replay(path)
    online = outcome.result.alarms["historian"]
    assert [(a.tick, a.name) for a in replayed] == [(a.tick, a.name) for a in online]


def test_replay_nominal_is_quiet(tmp_path, nominal_10k):
    path = tmp_path / "nominal.csv"
    export_run(nominal_10k, path)
    assert replay(path) == []
