import pytest

from plantwatch.attacks import (ALL_KINDS, INSIDER_ONLY, AttackPrimitive,
                                AttackScenario, ScenarioError, load_catalog,
                                load_scenario, validate_profile)


def test_catalog_sizes():
    assert len(load_catalog(2016)) == 18
    assert len(load_catalog(2017)) == 31


def test_catalog_numbers_sequential():
    for year, count in ((2016, 18), (2017, 31)):
        numbers = [s.number for s in load_catalog(year)]
        assert numbers == list(range(1, count + 1))


def test_remote_attacker_feasible_sets():
    remote_2016 = {s.number for s in load_catalog(2016)
                   if s.profile == "cyber-criminal"}
    remote_2017 = {s.number for s in load_catalog(2017)
                   if s.profile == "cyber-criminal"}
    assert remote_2016 == {4, 16}
    assert remote_2017 == {2, 9, 10, 12, 13, 15, 16, 17, 18, 19, 20, 21, 22,
                           24, 28, 29, 30}


def test_every_catalog_scenario_respects_its_profile():
    violations = [
        violation
        for year in (2016, 2017)
        for scenario in load_catalog(year)
        for violation in validate_profile(scenario)
    ]
    assert violations == []


def test_insider_primitive_under_remote_profile_rejected():
    timeline = (AttackPrimitive("rio_disconnect", 10, 20, {"plc": 1}),)
    scenario = AttackScenario("x", 2017, 1, "x", "RIO", "cyber-criminal",
                              timeline, False, False, 100)
    assert validate_profile(scenario)


def test_primitive_validation():
    with pytest.raises(ScenarioError):
        AttackPrimitive("teleport", 0, 10)
    with pytest.raises(ScenarioError):
        AttackPrimitive("sensor_offset", 10, 5)
    with pytest.raises(ScenarioError):
        AttackPrimitive("sensor_offset", 0, 10, {"tag": "LIT999", "delta": 1.0})


def test_insider_only_is_subset_of_all():
    assert INSIDER_ONLY < ALL_KINDS


def test_scenario_horizon_must_cover_attack(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text(
        'id = "x"\nyear = 2017\nnumber = 1\nname = "x"\nprofile = "insider"\n'
        "expected_wd = true\nhorizon = 100\n\n[[timeline]]\n"
        'kind = "syn_flood_plc"\nstart = 50\nend = 200\n\n'
        "[timeline.params]\nplc = 1\n")
    with pytest.raises(ScenarioError):
        load_scenario(bad)


def test_unknown_catalog_year():
    with pytest.raises(ScenarioError):
        load_catalog(2015)


def test_expected_wdh_optional():
    assert all(s.expected_wdh is None for s in load_catalog(2016))
    assert all(s.expected_wdh is not None for s in load_catalog(2017))
