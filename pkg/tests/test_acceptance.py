"""Acceptance gate.

Each test covers one release criterion and prints a single PASS/FAIL
line so the whole gate can be read off a ``pytest -s`` run.
"""

from importlib import resources

from plantwatch.attacks import load_catalog, load_scenario, validate_profile
from plantwatch.config import load_config
from plantwatch.harness import run_scenario
from plantwatch.invariants import predicted_balance_alarm
from plantwatch.network import export_csv, historian_columns, load_csv
from plantwatch.simulation import Simulation

EXPECTED_2016_PLC = {1, 5, 7, 9, 10, 11, 12, 13, 14, 18}
EXPECTED_2017_PLC = {3, 4, 7, 9, 10, 11, 12, 13, 15, 16, 18, 19, 20, 21, 22,
                     23, 26, 28, 29, 30, 31}
EXPECTED_2017_HISTORIAN = EXPECTED_2017_PLC | {2, 17, 24}
EXPECTED_2017_BY_CATEGORY = {
    "Valves": {"total": 2, "plc": 100, "historian": 100},
    "Pumps": {"total": 4, "plc": 75, "historian": 75},
    "Pressure": {"total": 2, "plc": 100, "historian": 100},
    "Tank level": {"total": 4, "plc": 100, "historian": 100},
    "Dosing": {"total": 4, "plc": 75, "historian": 75},
    "Historian": {"total": 3, "plc": 0, "historian": 100},
    "HMI/SCADA": {"total": 3, "plc": 67, "historian": 67},
    "PLC": {"total": 5, "plc": 100, "historian": 100},
    "RIO": {"total": 4, "plc": 0, "historian": 0},
}


class _Gate:
    """Prints one PASS/FAIL line per criterion, then re-raises."""

    def __init__(self, label):
        self.label = label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        print(f"{verdict}: {self.label}")
        return False


def test_criterion_1_2016_catalog_matrix(catalog_2016):
    with _Gate("2016 catalog: in-PLC detection set and rate match"):
        assert catalog_2016.detected_numbers("plc") == EXPECTED_2016_PLC
        assert round(catalog_2016.rate("plc"), 2) == 55.56
        assert catalog_2016.deviations == []


def test_criterion_2_2017_catalog_matrix(catalog_2017):
    with _Gate("2017 catalog: both placements and category table match"):
        assert catalog_2017.detected_numbers("plc") == EXPECTED_2017_PLC
        assert catalog_2017.detected_numbers("historian") == EXPECTED_2017_HISTORIAN
        assert round(catalog_2017.rate("plc"), 2) == 67.74
        assert round(catalog_2017.rate("historian"), 2) == 77.42
        assert catalog_2017.deviations == []
        assert catalog_2017.by_category() == EXPECTED_2017_BY_CATEGORY


def test_criterion_3_frozen_level_scenario_event_order():
    with _Gate("frozen-level demo: decline, alarm before dry-out, snap-back"):
        scenario = load_scenario(
            resources.files("plantwatch") / "data" / "scenarios" / "dry-run.toml")
        outcome = run_scenario(scenario)
        trace = outcome.result.trace
        start = scenario.attack_start
        dead = load_config().tanks["T101"].dead_level

        dry_tick = next(row["tick"] for row in trace
                        if row["level"]["T101"] <= dead)
        assert 1250 <= dry_tick <= 1450

        # the true level only falls while the reading is frozen
        span = [row for row in trace if start + 2 <= row["tick"] <= dry_tick]
        assert all(b["level"]["T101"] <= a["level"]["T101"]
                   for a, b in zip(span, span[1:]))

        # outflow collapses once the tank is effectively empty
        after_dry = next(row for row in trace if row["tick"] == dry_tick + 1)
        assert after_dry["flow"]["FIT201"] == 0.0

        # the balance alarm lands well before the dry-out
        first = outcome.first_alarm("plc")
        assert first is not None and first.family == "balance"
        assert start < first.tick < dry_tick

        # when the freeze lifts the stored reading snaps back to the truth
        stored = dict(outcome.result.historian.query(
            "LIT101", (scenario.attack_end - 2, scenario.attack_end + 5)))
        snap = next(t for t in sorted(stored) if stored[t] < 400.0)
        assert scenario.attack_end <= snap <= scenario.attack_end + 3
        assert stored[snap - 1] > 700.0


def _slow_first_alarm(start, drift, window, epsilon, horizon):
    """Tick-by-tick mirror of the windowed balance check for a frozen
    reading whose true level moves by ``drift`` per tick."""
    count, total, estimate = 0, 0.0, 0.0
    for tick in range(horizon):
        if count == 0:
            estimate = 0.0
        elif tick > start:
            estimate += drift
        total += abs(estimate)
        count += 1
        if count == window:
            if total / window > epsilon:
                return tick
            count, total = 0, 0.0
    return None


def test_criterion_4_closed_form_matches_slow_oracle():
    with _Gate("closed-form alarm tick within one window of the slow oracle"):
        window, epsilon = 30, 1.3
        for start in (0, 17, 350, 361, 373, 1199):
            for drift in (0.05, 0.125, 0.625, 2.0):
                fast = predicted_balance_alarm(start, drift, window, epsilon,
                                               horizon=20_000)
                slow = _slow_first_alarm(start, drift, window, epsilon, 20_000)
                assert (fast is None) == (slow is None)
                if fast is not None:
                    assert abs(fast - slow) <= window


def test_criterion_5_nominal_run_is_quiet(nominal_10k):
    with _Gate("10k-tick nominal run with default noise raises no alarm"):
        assert nominal_10k.alarms["plc"] == []
        assert nominal_10k.alarms["historian"] == []


def test_criterion_6_property_suite(nominal_10k, catalog_2017, tmp_path):
    with _Gate("properties: mass, determinism, view isolation, profiles, CSV"):
        # mass conservation across every nominal step
        alpha = 0.25
        external = ("T601_DRAIN", "T602_DRAIN", "BACKWASH")
        for before, after in zip(nominal_10k.trace, nominal_10k.trace[1:]):
            delta = sum(after["level"].values()) - sum(before["level"].values())
            boundary = after["flow"]["FIT101"] - sum(after["flow"][p]
                                                     for p in external)
            assert abs(delta - alpha * boundary) <= 1e-9 * max(
                1.0, sum(before["level"].values()))

        # identical configuration gives byte-identical historian output
        digests = []
        for i in (0, 1):
            result = Simulation(load_config(), "v2017").run(600)
            path = tmp_path / f"det{i}.csv"
            export_csv(result.historian, path)
            digests.append(path.read_bytes())
        assert digests[0] == digests[1]

        # tampering visible only from the view it targets
        by_number = {o.scenario.number: o for o in catalog_2017.outcomes}
        for number in (2, 17, 24):
            assert by_number[number].verdicts == {"plc": False, "historian": True}
        for number in (8, 14, 25, 27):
            assert by_number[number].verdicts == {"plc": False, "historian": False}

        # every catalogued scenario is feasible under its attacker profile
        assert sum(len(validate_profile(s))
                   for year in (2016, 2017) for s in load_catalog(year)) == 0

        # historian CSV round trip preserves columns and final values
        csv_path = tmp_path / "roundtrip.csv"
        export_csv(nominal_10k.historian, csv_path)
        columns, rows = load_csv(csv_path)
        assert columns == historian_columns()
        final_tick, final_row = rows[-1]
        for tag in columns:
            assert final_row[tag] == nominal_10k.historian.latest(tag)
