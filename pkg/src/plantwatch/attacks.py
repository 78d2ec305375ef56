"""Attack scenario model: primitives, attacker profiles, catalog loading.

A scenario is a timeline of primitives, each active over an inclusive
tick window.  Primitives describe *access*, not outcome: where in the
plant the attacker sits (a network link, the HMI, a PLC program, the
Historian) and what they do there.  The simulation maps each primitive
onto the corresponding channel hook, mode change, or program patch.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .tags import TAGS

# Primitive kinds, grouped by the access they presume.
NETWORK_KINDS = frozenset({
    "sensor_spoof_constant",   # level-0 value rewrite to a constant
    "sensor_offset",           # level-0 value offset
    "l0_mitm_rewrite",         # synonym access path for a level-0 rewrite
    "l1_mitm_rewrite",         # rewrite on one level-1 link (dest-specific)
    "actuator_override_net",   # forged actuator commands at the remote I/O
    "drop_traffic_to",         # drop a level-1 link (historian or workstation)
    "syn_flood_plc",           # flood a PLC: its outbound level-1 links die
})
SYSTEM_KINDS = frozenset({
    "plc_reprogram_pin",       # reprogrammed PLC pins register/command values
    "setpoint_change",         # rewrite one control rule in a PLC program
    "historian_tamper",        # mutate values as the historian stores them
})
PHYSICAL_KINDS = frozenset({
    "actuator_override_hmi",   # manual mode + overrides from the workstation
    "dosing_override",         # manual mode targeting dosing pumps
    "actuator_flicker_hmi",    # manual mode, alternating one actuator
    "rio_disconnect",          # unplug a stage's remote I/O (level 0 dead)
    "manual_cable_disconnect", # same effect, done at the cable tray
})
ALL_KINDS = NETWORK_KINDS | SYSTEM_KINDS | PHYSICAL_KINDS

# Primitives requiring plant-floor or operator-console presence.
INSIDER_ONLY = PHYSICAL_KINDS

PROFILES = ("insider", "cyber-criminal")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class AttackPrimitive:
    kind: str
    start: int
    end: int          # inclusive
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ScenarioError(f"unknown primitive kind {self.kind!r}")
        if not 0 <= self.start <= self.end:
            raise ScenarioError(f"{self.kind}: bad window [{self.start}, {self.end}]")
        for key in ("tag",):
            if key in self.params and self.params[key] not in TAGS:
                raise ScenarioError(f"{self.kind}: unknown tag {self.params[key]!r}")


@dataclass(frozen=True)
class AttackScenario:
    scenario_id: str
    year: int
    number: int
    name: str
    category: str
    profile: str
    timeline: tuple[AttackPrimitive, ...]
    expected_wd: bool
    expected_wdh: bool | None   # None for catalogs without a historian placement
    horizon: int
    notes: str = ""

    @property
    def attack_start(self) -> int:
        return min(p.start for p in self.timeline)

    @property
    def attack_end(self) -> int:
        return max(p.end for p in self.timeline)


def validate_profile(scenario: AttackScenario) -> list[str]:
    """Primitives the scenario uses that its declared profile cannot."""
    if scenario.profile not in PROFILES:
        return [f"{scenario.scenario_id}: unknown profile {scenario.profile!r}"]
    if scenario.profile == "insider":
        return []
    return [
        f"{scenario.scenario_id}: {p.kind} requires plant access"
        for p in scenario.timeline if p.kind in INSIDER_ONLY
    ]


def _scenario_from_dict(data: dict, origin: str) -> AttackScenario:
    try:
        timeline = tuple(
            AttackPrimitive(
                kind=entry["kind"],
                start=int(entry["start"]),
                end=int(entry["end"]),
                params=dict(entry.get("params", {})),
            )
            for entry in data["timeline"]
        )
        if not timeline:
            raise ScenarioError("empty timeline")
        scenario = AttackScenario(
            scenario_id=data["id"],
            year=int(data["year"]),
            number=int(data["number"]),
            name=data["name"],
            category=data.get("category", ""),
            profile=data["profile"],
            timeline=timeline,
            expected_wd=bool(data["expected_wd"]),
            expected_wdh=(bool(data["expected_wdh"])
                          if "expected_wdh" in data else None),
            horizon=int(data["horizon"]),
            notes=data.get("notes", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{origin}: {exc}") from exc
    if scenario.horizon <= scenario.attack_end:
        raise ScenarioError(f"{origin}: horizon must exceed the attack window")
    violations = validate_profile(scenario)
    if violations:
        raise ScenarioError("; ".join(violations))
    return scenario


def load_scenario(path: str | Path) -> AttackScenario:
    path = Path(path)
    with open(path, "rb") as fh:
        return _scenario_from_dict(tomllib.load(fh), str(path))


def catalog_dir(year: int) -> Path:
    return Path(resources.files("plantwatch") / "data" / "catalog" / str(year))


def load_catalog(year: int) -> list[AttackScenario]:
    directory = catalog_dir(year)
    if not directory.is_dir():
        raise ScenarioError(f"no catalog for year {year}")
    scenarios = [load_scenario(p) for p in sorted(directory.glob("*.toml"))]
    scenarios.sort(key=lambda s: s.number)
    return scenarios
