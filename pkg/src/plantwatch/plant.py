"""Discrete-time physics of the six-stage plant.

Water path: inlet -(MV101)-> T101 -(P101/P102, MV201)-> T301 -(P301/P302,
UF)-> T401 -(P501)-> RO, which splits into reject (T601, feeds backwash)
and permeate (T602).  T601/T602 drain through level-triggered discharge
valves.  Each tank's level advances by alpha * (net flow) per tick.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

from .config import NoiseSpec, PlantConfig
from .tags import DOSING_PUMPS, LEVEL_TAG_TANK, TAGS, TagKind

# Internal pipe names used in PlantState.flow (FIT101/FIT201 double as
# the measured pipes).
PIPES = ("FIT101", "FIT201", "UF", "RO", "RO_PERMEATE", "RO_REJECT",
         "BACKWASH", "T601_DRAIN", "T602_DRAIN")

PUMP_SOURCE = {"P101": "T101", "P102": "T101", "P301": "T301", "P302": "T301", "P501": "T401"}


class CommandError(ValueError):
    """A command referenced an unknown or non-actuator tag."""


class WrongKindError(TypeError):
    """A tag of the wrong kind was passed to a sensor/actuator operation."""


@dataclass(frozen=True)
class ActuatorPosition:
    value: str                       # Open/Closed/Opening/Closing or On/Off
    ticks_remaining: int = 0

    def __post_init__(self):
        if self.value in ("Open", "Closed", "On", "Off") and self.ticks_remaining != 0:
            raise ValueError(f"settled position {self.value} with ticks remaining")

    @property
    def settled(self) -> bool:
        return self.ticks_remaining == 0


@dataclass(frozen=True)
class PlantState:
    tick: int
    level: dict
    flow: dict
    dp: float
    ph: dict
    actuator: dict
    pump_dry_ticks: dict
    drain_active: dict

    def actuator_value(self, tag: str) -> str:
        return self.actuator[tag].value

    def is_open(self, tag: str) -> bool:
        return self.actuator[tag].value == "Open"

    def is_on(self, tag: str) -> bool:
        return self.actuator[tag].value == "On"


def initial_state(config: PlantConfig) -> PlantState:
    actuator = {}
    for tag, t in TAGS.items():
        if t.kind is TagKind.VALVE:
            actuator[tag] = ActuatorPosition(config.initial_actuators.get(tag, "Closed"))
        elif t.kind is TagKind.PUMP:
            actuator[tag] = ActuatorPosition(config.initial_actuators.get(tag, "Off"))
    return PlantState(
        tick=0,
        level={name: spec.initial for name, spec in config.tanks.items()},
        flow={pipe: 0.0 for pipe in PIPES},
        dp=config.uf.dp_initial,
        ph={a: config.ph_nominal for a in ("AIT202", "AIT503", "AIT504")},
        actuator=actuator,
        pump_dry_ticks={p: 0 for p in PUMP_SOURCE},
        drain_active={"T601": False, "T602": False},
    )


def _advance_actuator(pos: ActuatorPosition, command: str | None, transition: int) -> ActuatorPosition:
    if command is not None:
        if command in ("On", "Off"):
            return ActuatorPosition(command)
        moving = {"Open": "Opening", "Closed": "Closing"}[command]
        if pos.value != command and pos.value != moving:
            pos = ActuatorPosition(moving, transition)
    if pos.ticks_remaining > 0:
        remaining = pos.ticks_remaining - 1
        if remaining == 0:
            return ActuatorPosition({"Opening": "Open", "Closing": "Closed"}[pos.value])
        return ActuatorPosition(pos.value, remaining)
    return pos


def _dose_once(ph: float, target: float, rate: float) -> float:
    return ph + rate * (target - ph)


def apply_dosing(state: PlantState, pump: str, config: PlantConfig) -> PlantState:
    """Apply one On-tick of a dosing pump to its downstream analyzer."""
    if pump not in DOSING_PUMPS:
        raise WrongKindError(f"{pump} is not a dosing pump")
    spec = config.dosing[pump]
    ph = dict(state.ph)
    ph[spec.analyzer] = _dose_once(ph[spec.analyzer], spec.target_ph, spec.rate)
    return replace(state, ph=ph)


def step_plant(state: PlantState, commands: dict, config: PlantConfig) -> PlantState:
    """Advance the plant by one tick under the given actuator commands."""
    for tag in commands:
        if tag not in TAGS or TAGS[tag].kind not in (TagKind.VALVE, TagKind.PUMP):
            raise CommandError(f"command for unknown or non-actuator tag {tag!r}")

    actuator = {
        tag: _advance_actuator(pos, commands.get(tag), config.transition_ticks)
        for tag, pos in state.actuator.items()
    }

    def pump_rate(tag: str) -> float:
        return config.pump_rates[tag] if actuator[tag].value == "On" else 0.0

    level = state.level
    dead = {name: spec.dead_level for name, spec in config.tanks.items()}

    fit101 = config.valve_rates["MV101"] if actuator["MV101"].value == "Open" else 0.0

    fit201 = 0.0
    if actuator["MV201"].value == "Open" and level["T101"] > dead["T101"]:
        fit201 = pump_rate("P101") + pump_rate("P102")

    uf_path_open = actuator["MV302"].value == "Open" and actuator["MV303"].value == "Open"
    f_uf = 0.0
    if uf_path_open and level["T301"] > dead["T301"]:
        f_uf = pump_rate("P301") + pump_rate("P302")

    f_ro = pump_rate("P501") if level["T401"] > dead["T401"] else 0.0
    f_perm = f_ro * config.ro_permeate_frac
    f_rej = f_ro - f_perm

    uf_running = actuator["P301"].value == "On" or actuator["P302"].value == "On"
    backwash = (actuator["MV301"].value == "Open" and not uf_running
                and level["T601"] > dead["T601"])
    f_backwash = config.backwash_rate if backwash else 0.0

    drain_active = dict(state.drain_active)
    drains = {}
    for tank in ("T601", "T602"):
        if level[tank] >= config.discharge_on:
            drain_active[tank] = True
        elif level[tank] <= config.discharge_off:
            drain_active[tank] = False
        drains[tank] = config.discharge_rate if drain_active[tank] else 0.0

    flow = {
        "FIT101": fit101,
        "FIT201": fit201,
        "UF": f_uf,
        "RO": f_ro,
        "RO_PERMEATE": f_perm,
        "RO_REJECT": f_rej,
        "BACKWASH": f_backwash,
        "T601_DRAIN": drains["T601"],
        "T602_DRAIN": drains["T602"],
    }

    net = {
        "T101": fit101 - fit201,
        "T301": fit201 - f_uf,
        "T401": f_uf - f_ro,
        "T601": f_rej - f_backwash - drains["T601"],
        "T602": f_perm - drains["T602"],
    }
    new_level = {}
    for tank, spec in config.tanks.items():
        value = level[tank] + spec.alpha * net[tank]
        new_level[tank] = min(max(value, 0.0), spec.capacity)

    dp = state.dp
    if uf_running:
        misconfigured = not (uf_path_open and actuator["MV304"].value == "Closed")
        dp += config.uf.surge_rate if misconfigured else config.uf.foul_rate
    elif backwash:
        dp -= config.uf.backwash_decay
    dp = min(max(dp, config.uf.dp_initial if backwash else 0.0), config.uf.dp_cap)

    ph = dict(state.ph)
    dosed = set()
    for pump in DOSING_PUMPS:
        if actuator[pump].value == "On":
            spec = config.dosing[pump]
            ph[spec.analyzer] = _dose_once(ph[spec.analyzer], spec.target_ph, spec.rate)
            dosed.add(spec.analyzer)
    for analyzer in ph:
        if analyzer not in dosed:
            ph[analyzer] = ph[analyzer] + config.ph_relax * (config.ph_nominal - ph[analyzer])

    dry = {}
    for pump, source in PUMP_SOURCE.items():
        running_dry = actuator[pump].value == "On" and level[source] <= dead[source]
        dry[pump] = state.pump_dry_ticks[pump] + 1 if running_dry else 0

    return PlantState(
        tick=state.tick + 1,
        level=new_level,
        flow=flow,
        dp=dp,
        ph=ph,
        actuator=actuator,
        pump_dry_ticks=dry,
        drain_active=drain_active,
    )


def _noise_uniform(seed: int, tag: str, tick: int, bound: float) -> float:
    if bound == 0.0:
        return 0.0
    u = zlib.crc32(f"{seed}:{tag}:{tick}".encode()) / 2**32
    return (2.0 * u - 1.0) * bound


def read_sensor(state: PlantState, tag: str, noise: NoiseSpec, seed: int = 0) -> float:
    """Ground truth plus bounded zero-mean noise; exact with noise disabled."""
    kind = TAGS[tag].kind if tag in TAGS else None
    if kind is None or kind in (TagKind.VALVE, TagKind.PUMP):
        raise WrongKindError(f"{tag} is not a sensor tag")
    if kind is TagKind.LEVEL:
        truth, bound = state.level[LEVEL_TAG_TANK[tag]], noise.level_mm
    elif kind is TagKind.FLOW:
        truth, bound = state.flow[tag], noise.flow_m3h
    elif kind is TagKind.DP:
        truth, bound = state.dp, noise.dp_bar
    else:
        truth, bound = state.ph[tag], noise.ph
    if not noise.enabled:
        return truth
    return truth + _noise_uniform(seed, tag, state.tick, bound)
