"""Run orchestration: single scenarios, full catalogs, calibration, replay.

A scenario "deviates" when a placement's verdict differs from the
scenario's expectation; catalog runs report deviations per scenario and
aggregated per category.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .attacks import AttackScenario, load_catalog
from .config import PlantConfig, load_config
from .detectors import PLACEMENTS, detected
from .invariants import InvariantEngine, load_invariant_set
from .network import export_csv, load_csv
from .simulation import SimResult, Simulation


def invariant_profile_for_year(year: int) -> str:
    return "v2016" if year <= 2016 else "v2017"


@dataclass
class RunOutcome:
    scenario: AttackScenario
    result: SimResult
    verdicts: dict          # placement -> bool
    expected: dict          # placement -> bool | None

    @property
    def deviations(self) -> list[str]:
        return [
            placement for placement in PLACEMENTS
            if self.expected.get(placement) is not None
            and self.verdicts[placement] != self.expected[placement]
        ]

    def first_alarm(self, placement: str):
        start = self.scenario.attack_start
        hits = [a for a in self.result.alarms[placement] if a.tick >= start]
        return min(hits, key=lambda a: a.tick) if hits else None


def run_scenario(scenario: AttackScenario, config: PlantConfig | None = None,
                 invariant_profile: str | None = None,
                 settle_margin: int | None = None) -> RunOutcome:
    config = config if config is not None else load_config()
    profile = invariant_profile or invariant_profile_for_year(scenario.year)
    margin = settle_margin if settle_margin is not None else config.settle_margin
    result = Simulation(config, profile, scenario).run(scenario.horizon)
    start, end = scenario.attack_start, scenario.attack_end
    verdicts = {p: detected(result.alarms[p], start, end, margin) for p in PLACEMENTS}
    expected = {"plc": scenario.expected_wd, "historian": scenario.expected_wdh}
    return RunOutcome(scenario, result, verdicts, expected)


def run_nominal(config: PlantConfig | None = None, invariant_profile: str = "v2017",
                ticks: int = 10_000) -> SimResult:
    config = config if config is not None else load_config()
    return Simulation(config, invariant_profile).run(ticks)


@dataclass
class CatalogReport:
    year: int
    outcomes: list

    def detected_numbers(self, placement: str) -> set:
        return {o.scenario.number for o in self.outcomes if o.verdicts[placement]}

    def rate(self, placement: str) -> float:
        if not self.outcomes:
            return 0.0
        return 100.0 * len(self.detected_numbers(placement)) / len(self.outcomes)

    @property
    def deviations(self) -> list:
        return [o for o in self.outcomes if o.deviations]

    def by_category(self) -> dict:
        """category -> {'total': n, 'plc': pct, 'historian': pct}"""
        table: dict = {}
        for outcome in self.outcomes:
            row = table.setdefault(outcome.scenario.category,
                                   {"total": 0, "plc": 0, "historian": 0})
            row["total"] += 1
            for placement in PLACEMENTS:
                row[placement] += int(outcome.verdicts[placement])
        return {
            cat: {
                "total": row["total"],
                "plc": round(100.0 * row["plc"] / row["total"]),
                "historian": round(100.0 * row["historian"] / row["total"]),
            }
            for cat, row in table.items()
        }


def run_catalog(year: int, config: PlantConfig | None = None,
                invariant_profile: str | None = None,
                settle_margin: int | None = None) -> CatalogReport:
    config = config if config is not None else load_config()
    outcomes = [
        run_scenario(scenario, config, invariant_profile, settle_margin)
        for scenario in load_catalog(year)
    ]
    return CatalogReport(year, outcomes)


@dataclass
class CalibrationReport:
    ticks: int
    peaks: dict             # tank -> largest nominal window mean (mm)
    thresholds: dict        # tank -> configured threshold
    suggested: dict         # tank -> 3x peak
    false_alarms: dict      # placement -> alarm count


def calibrate(config: PlantConfig | None = None, invariant_profile: str = "v2017",
              ticks: int = 10_000) -> CalibrationReport:
    config = config if config is not None else load_config()
    sim = Simulation(config, invariant_profile)
    result = sim.run(ticks)
    invariants = {inv.name: inv for inv in sim.wd.engine.invariants.balance}
    peaks = {invariants[name].tank: peak
             for name, peak in sim.wd.engine.peaks.items()}
    return CalibrationReport(
        ticks=ticks,
        peaks=peaks,
        thresholds={inv.tank: inv.epsilon for inv in invariants.values()},
        suggested={tank: round(3.0 * peak, 3) for tank, peak in peaks.items()},
        false_alarms={p: len(result.alarms[p]) for p in PLACEMENTS},
    )


def export_run(result: SimResult, path: str | Path) -> None:
    export_csv(result.historian, path)


class _RowView:
    def __init__(self, row: dict):
        self._row = row

    def get(self, tag: str):
        return self._row.get(tag)


def replay(csv_path: str | Path, config: PlantConfig | None = None,
           invariant_profile: str = "v2017"):
    """Re-run the invariant checks over an exported historian CSV."""
    config = config if config is not None else load_config()
    engine = InvariantEngine(load_invariant_set(invariant_profile, config))
    _, rows = load_csv(csv_path)
    alarms = []
    last: dict = {}
    for tick, row in rows:
        last.update(row)
        view = _RowView(last)
        views = {plc: view for plc in (1, 2, 3, 4, 5)}
        alarms.extend(engine.evaluate(tick, views))
    return alarms
