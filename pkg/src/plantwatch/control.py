"""Per-stage PLC logic.

Each PLC keeps a register file (its view of the world, updated only by
delivered messages), scans a rule set once per tick, and emits actuator
commands.  Rules fire on the register file, so stale or forged registers
drive control just as faithfully as true ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conditions import MissingTagError, Predicate, parse_predicate
from .tags import TAGS, TagKind, stage_tags


class OverrideError(ValueError):
    """A manual override named a tag outside the PLC's stage."""


@dataclass(frozen=True)
class ControlRule:
    guard: Predicate
    actuator: str
    position: str
    priority: int

    def __str__(self):
        return f"{self.guard} -> {self.actuator} {self.position} @ {self.priority}"


def parse_rule(text: str, markers) -> ControlRule:
    guard_text, action = text.split("->", 1)
    action, priority = action.rsplit("@", 1)
    actuator, position = action.split()
    if actuator not in TAGS or TAGS[actuator].kind not in (TagKind.VALVE, TagKind.PUMP):
        raise ValueError(f"rule action targets non-actuator {actuator!r}")
    return ControlRule(parse_predicate(guard_text, markers), actuator, position, int(priority))


def parse_rules(raw: list[str], markers) -> list[ControlRule]:
    return [parse_rule(text, markers) for text in raw]


class RegisterView:
    """Read view over a register file with program patches overlaid."""

    def __init__(self, registers: dict, patches: dict):
        self._registers = registers
        self._patches = patches

    def get(self, tag: str):
        if tag in self._patches:
            return self._patches[tag]
        entry = self._registers.get(tag)
        return entry[0] if entry is not None else None


@dataclass
class PlcState:
    plc_id: int
    registers: dict = field(default_factory=dict)   # tag -> (value, receipt tick)
    mode: str = "Auto"
    manual_overrides: dict = field(default_factory=dict)
    program_patches: dict = field(default_factory=dict)

    @property
    def own_tags(self) -> list[str]:
        return stage_tags(self.plc_id)

    def update_register(self, tag: str, value, tick: int) -> None:
        self.registers[tag] = (value, tick)

    def staleness(self, tag: str, tick: int) -> int | None:
        entry = self.registers.get(tag)
        return None if entry is None else tick - entry[1]

    def view(self) -> RegisterView:
        return RegisterView(self.registers, self.program_patches)


def plc_scan(plc: PlcState, rules: list[ControlRule]) -> dict:
    """One scan cycle: rule-derived commands in Auto, overrides in Manual.

    Program patches substitute pinned constants into the registers before
    rule evaluation.  A PLC always scans; a rule whose guard references a
    tag never yet delivered simply does not fire.
    """
    if plc.mode == "Manual":
        return dict(plc.manual_overrides)
    view = plc.view()
    winner: dict[str, ControlRule] = {}
    for rule in rules:
        try:
            fired = rule.guard.holds(view)
        except MissingTagError:
            continue
        if fired:
            best = winner.get(rule.actuator)
            if best is None or rule.priority > best.priority:
                winner[rule.actuator] = rule
    commands = {tag: rule.position for tag, rule in winner.items()}
    # A reprogrammed PLC pins actuator commands as well as sensor values.
    for tag, pinned in plc.program_patches.items():
        if TAGS[tag].kind in (TagKind.VALVE, TagKind.PUMP):
            commands[tag] = pinned
    return commands


def set_mode(plc: PlcState, mode: str, overrides: dict | None = None) -> PlcState:
    """Switch Auto/Manual.  Overrides must target the PLC's own stage."""
    if mode not in ("Auto", "Manual"):
        raise ValueError(f"unknown mode {mode!r}")
    overrides = dict(overrides or {})
    for tag in overrides:
        if tag not in plc.own_tags:
            raise OverrideError(f"override for {tag} outside PLC{plc.plc_id}'s stage")
    plc.mode = mode
    plc.manual_overrides = overrides if mode == "Manual" else {}
    return plc
