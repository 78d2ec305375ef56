"""Tag vocabulary of the six-stage plant.

Tag names follow the conventional ICS prefixes: LIT (level indicator),
FIT (flow indicator), AIT (analyzer), DPIT (differential pressure),
MV (motorized valve), P (pump).  The stage is the leading digit of the
numeric suffix.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TagKind(Enum):
    LEVEL = "level-sensor"
    FLOW = "flow-sensor"
    ANALYZER = "analyzer"
    DP = "dp-sensor"
    VALVE = "valve"
    PUMP = "pump"


SENSOR_KINDS = {TagKind.LEVEL, TagKind.FLOW, TagKind.ANALYZER, TagKind.DP}
ACTUATOR_KINDS = {TagKind.VALVE, TagKind.PUMP}

_PREFIX_KIND = {
    "LIT": TagKind.LEVEL,
    "FIT": TagKind.FLOW,
    "AIT": TagKind.ANALYZER,
    "DPIT": TagKind.DP,
    "MV": TagKind.VALVE,
    "P": TagKind.PUMP,
}


@dataclass(frozen=True)
class TagId:
    name: str
    kind: TagKind
    stage: int

    def __post_init__(self):
        prefix = self.name.rstrip("0123456789")
        expected = _PREFIX_KIND.get(prefix)
        if expected is None or expected is not self.kind:
            raise ValueError(f"tag {self.name}: kind {self.kind} inconsistent with prefix")
        if not 1 <= self.stage <= 6:
            raise ValueError(f"tag {self.name}: stage {self.stage} out of range")

    def __str__(self):
        return self.name


def _tag(name: str) -> TagId:
    prefix = name.rstrip("0123456789")
    stage = int(name[len(prefix)])
    return TagId(name, _PREFIX_KIND[prefix], stage)


_TAG_NAMES = [
    # stage 1
    "LIT101", "FIT101", "MV101", "P101", "P102",
    # stage 2
    "FIT201", "AIT202", "MV201", "P201", "P203", "P204", "P205",
    # stage 3
    "LIT301", "DPIT301", "MV301", "MV302", "MV303", "MV304", "P301", "P302",
    # stage 4
    "LIT401", "P403", "P404",
    # stage 5
    "AIT503", "AIT504", "P501",
]

TAGS: dict[str, TagId] = {name: _tag(name) for name in _TAG_NAMES}

# Water storage tanks, keyed by name with their stage.  Tanks are plant
# internals, not tags; T601/T602 carry no level sensor.
TANKS: dict[str, int] = {"T101": 1, "T301": 3, "T401": 4, "T601": 6, "T602": 6}

# Tank monitored by each level sensor.
LEVEL_TAG_TANK = {"LIT101": "T101", "LIT301": "T301", "LIT401": "T401"}

DOSING_PUMPS = ("P201", "P203", "P204", "P205", "P403", "P404")

VALVE_STATES = ("Open", "Closed", "Opening", "Closing")
PUMP_STATES = ("On", "Off")


def tag(name: str) -> TagId:
    try:
        return TAGS[name]
    except KeyError:
        raise KeyError(f"unknown tag {name!r}") from None


def is_sensor(name: str) -> bool:
    return TAGS[name].kind in SENSOR_KINDS


def is_actuator(name: str) -> bool:
    return TAGS[name].kind in ACTUATOR_KINDS


def stage_tags(stage: int) -> list[str]:
    return [name for name, t in TAGS.items() if t.stage == stage]


# Numeric encoding of actuator states for CSV export (and back).
_STATE_CODE = {"Off": 0.0, "On": 1.0, "Closed": 0.0, "Open": 1.0, "Opening": 2.0, "Closing": 3.0}
_VALVE_DECODE = {0.0: "Closed", 1.0: "Open", 2.0: "Opening", 3.0: "Closing"}
_PUMP_DECODE = {0.0: "Off", 1.0: "On"}


def encode_value(name: str, value) -> float:
    if isinstance(value, str):
        return _STATE_CODE[value]
    return float(value)


def decode_value(name: str, raw: float):
    kind = TAGS[name].kind
    if kind is TagKind.VALVE:
        return _VALVE_DECODE[float(raw)]
    if kind is TagKind.PUMP:
        return _PUMP_DECODE[float(raw)]
    return float(raw)
