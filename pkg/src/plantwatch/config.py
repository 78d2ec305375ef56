"""Plant, control, and detection configuration.

All numeric plant parameters live in an INI file with per-tank,
per-actuator, and per-rule sections.  Documented defaults ship with the
package (``data/default.ini``); every value is overridable.  One tick is
one second of plant time.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TankSpec:
    name: str
    alpha: float          # mm per (m3/h * tick)
    dead_level: float     # mm; outflow ceases at or below
    capacity: float       # mm
    initial: float        # mm

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError(f"{self.name}: alpha must be positive")
        if not 0 <= self.dead_level < self.capacity:
            raise ConfigError(f"{self.name}: dead_level outside [0, capacity)")


@dataclass(frozen=True)
class MarkerSet:
    tank: str
    ll: float
    l: float
    h: float
    hh: float

    def __post_init__(self):
        if not 0 < self.ll < self.l < self.h < self.hh:
            raise ConfigError(f"{self.tank}: markers must satisfy 0 < LL < L < H < HH")


@dataclass(frozen=True)
class DosingSpec:
    pump: str
    analyzer: str
    target_ph: float
    rate: float  # fraction of (target - current) applied per On-tick


@dataclass(frozen=True)
class NoiseSpec:
    enabled: bool = True
    level_mm: float = 0.4
    flow_m3h: float = 0.08
    dp_bar: float = 0.004
    ph: float = 0.01


@dataclass(frozen=True)
class UfSpec:
    dp_initial: float = 0.10
    foul_rate: float = 0.0004     # bar/tick while UF runs normally
    surge_rate: float = 0.02      # bar/tick while UF runs misconfigured
    backwash_decay: float = 0.01  # bar/tick during backwash
    dp_cap: float = 1.5


@dataclass
class PlantConfig:
    tanks: dict[str, TankSpec]
    markers: dict[str, MarkerSet]
    pump_rates: dict[str, float]          # m3/h when On
    valve_rates: dict[str, float]         # m3/h through an Open valve (MV101 inlet)
    transition_ticks: int
    ro_permeate_frac: float
    backwash_rate: float                  # m3/h drawn from T601 during backwash
    discharge_rate: float                 # m3/h out of T601/T602 drain
    discharge_on: float                   # mm, drain engages at or above
    discharge_off: float                  # mm, drain releases at or below
    uf: UfSpec
    dosing: dict[str, DosingSpec]
    ph_nominal: float
    ph_relax: float
    noise: NoiseSpec
    initial_actuators: dict[str, str]
    rules_raw: dict[int, list[str]]       # per-PLC rule strings, parsed by control
    remote_tags: dict[int, list[str]]     # tags each PLC requests over Level 1
    settle_margin: int = 60
    seed: int = 1
    sa_window: int = 30
    sa_epsilon: dict[str, float] = field(default_factory=dict)


def default_config_path() -> Path:
    return Path(resources.files("plantwatch") / "data" / "default.ini")


def _floats(section) -> dict[str, float]:
    return {k.upper(): float(v) for k, v in section.items()}


def load_config(path: str | Path | None = None) -> PlantConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # tag names are case sensitive
    target = Path(path) if path is not None else default_config_path()
    read = parser.read(target)
    if not read:
        raise ConfigError(f"cannot read config file {target}")

    try:
        tanks = {}
        markers = {}
        for section in parser.sections():
            if section.startswith("tank."):
                name = section.split(".", 1)[1]
                s = parser[section]
                tanks[name] = TankSpec(
                    name,
                    alpha=s.getfloat("alpha"),
                    dead_level=s.getfloat("dead_level"),
                    capacity=s.getfloat("capacity"),
                    initial=s.getfloat("initial"),
                )
            elif section.startswith("markers."):
                name = section.split(".", 1)[1]
                s = parser[section]
                markers[name] = MarkerSet(
                    name,
                    ll=s.getfloat("ll"),
                    l=s.getfloat("l"),
                    h=s.getfloat("h"),
                    hh=s.getfloat("hh"),
                )

        dosing = {}
        for section in parser.sections():
            if section.startswith("dosing."):
                pump = section.split(".", 1)[1]
                s = parser[section]
                dosing[pump] = DosingSpec(
                    pump,
                    analyzer=s.get("analyzer"),
                    target_ph=s.getfloat("target_ph"),
                    rate=s.getfloat("rate"),
                )

        rules_raw = {}
        remote_tags = {}
        for plc in range(1, 7):
            section = f"rules.plc{plc}"
            if parser.has_section(section):
                rules_raw[plc] = [v for _, v in sorted(parser[section].items())]
            else:
                rules_raw[plc] = []
        if parser.has_section("remote"):
            for key, value in parser["remote"].items():
                plc = int(key.replace("plc", ""))
                remote_tags[plc] = [t.strip() for t in value.split(",") if t.strip()]

        noise_s = parser["noise"]
        noise = NoiseSpec(
            enabled=noise_s.getboolean("enabled"),
            level_mm=noise_s.getfloat("level_mm"),
            flow_m3h=noise_s.getfloat("flow_m3h"),
            dp_bar=noise_s.getfloat("dp_bar"),
            ph=noise_s.getfloat("ph"),
        )
        uf_s = parser["uf"]
        uf = UfSpec(
            dp_initial=uf_s.getfloat("dp_initial"),
            foul_rate=uf_s.getfloat("foul_rate"),
            surge_rate=uf_s.getfloat("surge_rate"),
            backwash_decay=uf_s.getfloat("backwash_decay"),
            dp_cap=uf_s.getfloat("dp_cap"),
        )
        sim = parser["simulation"]
        det = parser["detection"]
        return PlantConfig(
            tanks=tanks,
            markers=markers,
            pump_rates=_floats(parser["pump_rates"]),
            valve_rates=_floats(parser["valve_rates"]),
            transition_ticks=parser["valves"].getint("transition_ticks"),
            ro_permeate_frac=parser["ro"].getfloat("permeate_frac"),
            backwash_rate=parser["backwash"].getfloat("rate"),
            discharge_rate=parser["discharge"].getfloat("rate"),
            discharge_on=parser["discharge"].getfloat("on_level"),
            discharge_off=parser["discharge"].getfloat("off_level"),
            uf=uf,
            dosing=dosing,
            ph_nominal=parser["ph"].getfloat("nominal"),
            ph_relax=parser["ph"].getfloat("relax"),
            noise=noise,
            initial_actuators=dict(parser["initial_actuators"]),
            rules_raw=rules_raw,
            remote_tags=remote_tags,
            settle_margin=det.getint("settle_margin"),
            seed=sim.getint("seed"),
            sa_window=det.getint("sa_window"),
            sa_epsilon={k.upper(): float(v) for k, v in parser["sa_epsilon"].items()},
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config {target}: {exc}") from exc
