"""Process invariants and their evaluation engine.

Two families:

* state invariants: ``guard => requires`` over the current data view.  The
  guard must hold for ``grace`` consecutive ticks before the requirement
  is enforced, which rides out actuator travel and command latency.
* balance invariants: a per-tank windowed mass-balance test.  A level
  estimate is advanced from the reported flows; the mean absolute gap
  between estimate and reported level over a tumbling window must stay
  under a threshold.  The estimate re-anchors to the reported level at
  every window boundary, so the test needs no long-term model fidelity.

The same invariant definitions run in both detector placements; only the
data view differs.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .conditions import MissingTagError, Predicate, parse_predicate
from .config import PlantConfig
from .tags import LEVEL_TAG_TANK, TAGS, TagKind

PROFILES = ("v2016", "v2017")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Alarm:
    tick: int
    name: str
    plc: int
    family: str  # "state" | "balance"
    detail: str


@dataclass(frozen=True)
class StateInvariant:
    name: str
    plc: int
    guard: Predicate
    requires: Predicate
    grace: int

    def __post_init__(self):
        if self.grace < 1:
            raise ProfileError(f"{self.name}: grace must be >= 1")


@dataclass(frozen=True)
class FlowTerm:
    """One term of a flow estimate: a flow reading, or a pump's rated flow
    counted while its reported state is On."""

    tag: str
    rate: float | None = None

    def value(self, view) -> float:
        got = view.get(self.tag)
        if got is None:
            raise MissingTagError(self.tag)
        if self.rate is not None:
            return self.rate if got == "On" else 0.0
        return float(got)

    def __str__(self):
        return self.tag if self.rate is None else f"{self.tag}*{self.rate}"


@dataclass(frozen=True)
class BalanceInvariant:
    name: str
    plc: int
    tank: str
    level: str
    inflow: tuple[FlowTerm, ...]
    outflow: tuple[FlowTerm, ...]
    alpha: float
    window: int
    epsilon: float


def _parse_terms(raw: str) -> tuple[FlowTerm, ...]:
    terms = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "*" in part:
            tag, rate = part.split("*", 1)
            tag = tag.strip()
            if TAGS[tag].kind is not TagKind.PUMP:
                raise ProfileError(f"rated-flow term on non-pump tag {tag}")
            terms.append(FlowTerm(tag, float(rate)))
        else:
            if TAGS[part].kind is not TagKind.FLOW:
                raise ProfileError(f"flow term on non-flow tag {part}")
            terms.append(FlowTerm(part))
    return tuple(terms)


@dataclass(frozen=True)
class InvariantSet:
    profile: str
    state: tuple[StateInvariant, ...]
    balance: tuple[BalanceInvariant, ...]


def load_invariant_set(profile: str, config: PlantConfig) -> InvariantSet:
    if profile not in PROFILES:
        raise ProfileError(f"unknown invariant profile {profile!r}")
    path = Path(resources.files("plantwatch") / "data" / f"invariants_{profile}.ini")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if not parser.read(path):
        raise ProfileError(f"cannot read invariant file {path}")

    state = []
    balance = []
    for section in parser.sections():
        kind, _, name = section.partition(".")
        s = parser[section]
        if kind == "state":
            state.append(StateInvariant(
                name=name,
                plc=s.getint("plc"),
                guard=parse_predicate(s.get("guard"), config.markers),
                requires=parse_predicate(s.get("requires"), config.markers),
                grace=s.getint("grace"),
            ))
        elif kind == "balance":
            tank = s.get("tank")
            level = s.get("level")
            if LEVEL_TAG_TANK.get(level) != tank:
                raise ProfileError(f"{name}: {level} does not measure {tank}")
            if tank not in config.sa_epsilon:
                raise ProfileError(f"{name}: no residual threshold for {tank}")
            balance.append(BalanceInvariant(
                name=name,
                plc=s.getint("plc"),
                tank=tank,
                level=level,
                inflow=_parse_terms(s.get("inflow")),
                outflow=_parse_terms(s.get("outflow")),
                alpha=config.tanks[tank].alpha,
                window=config.sa_window,
                epsilon=config.sa_epsilon[tank],
            ))
        else:
            raise ProfileError(f"unknown invariant section {section!r}")
    return InvariantSet(profile, tuple(state), tuple(balance))


@dataclass
class _BalanceState:
    count: int = 0
    estimate: float = 0.0
    total: float = 0.0

    def reset(self):
        self.count = 0
        self.total = 0.0


class InvariantEngine:
    """Evaluates one invariant set against per-PLC data views, keeping the
    per-invariant state (guard hold counters, window accumulators)."""

    def __init__(self, invariants: InvariantSet):
        self.invariants = invariants
        self._hold = {inv.name: 0 for inv in invariants.state}
        self._bal = {inv.name: _BalanceState() for inv in invariants.balance}
        self.skips = {inv.name: 0 for inv in invariants.state + invariants.balance}
        # largest window mean seen per balance invariant; feeds calibration
        self.peaks = {inv.name: 0.0 for inv in invariants.balance}

    def evaluate(self, tick: int, views: dict) -> list[Alarm]:
        alarms = []
        for inv in self.invariants.state:
            view = views[inv.plc]
            try:
                held = inv.guard.holds(view)
            except MissingTagError:
                self.skips[inv.name] += 1
                self._hold[inv.name] = 0
                continue
            if not held:
                self._hold[inv.name] = 0
                continue
            self._hold[inv.name] += 1
            if self._hold[inv.name] < inv.grace:
                continue
            try:
                satisfied = inv.requires.holds(view)
            except MissingTagError:
                self.skips[inv.name] += 1
                continue
            if not satisfied:
                alarms.append(Alarm(tick, inv.name, inv.plc, "state",
                                    f"{inv.guard} but not {inv.requires}"))

        for inv in self.invariants.balance:
            view = views[inv.plc]
            st = self._bal[inv.name]
            try:
                y = view.get(inv.level)
                if y is None:
                    raise MissingTagError(inv.level)
                y = float(y)
                net = (sum(t.value(view) for t in inv.inflow)
                       - sum(t.value(view) for t in inv.outflow))
            except MissingTagError:
                self.skips[inv.name] += 1
                st.reset()
                continue
            if st.count == 0:
                st.estimate = y
            else:
                st.estimate += inv.alpha * net
            st.total += abs(st.estimate - y)
            st.count += 1
            if st.count == inv.window:
                mean = st.total / inv.window
                self.peaks[inv.name] = max(self.peaks[inv.name], mean)
                if mean > inv.epsilon:
                    alarms.append(Alarm(tick, inv.name, inv.plc, "balance",
                                        f"window mean {mean:.3f} > {inv.epsilon}"))
                st.reset()
        return alarms


def predicted_balance_alarm(attack_start: int, drift: float, window: int,
                            epsilon: float, horizon: int = 100_000) -> int | None:
    """Closed-form first-alarm tick for a frozen level reading.

    The reading freezes at ``attack_start`` while the true level moves by
    ``drift`` mm per tick (reported flows stay truthful).  Within a window
    the estimate re-anchors at the boundary, so the residual at in-window
    position j is ``(j - m) * drift`` once the freeze is active, where m is
    the freeze offset into the window.  Returns the end tick of the first
    window whose mean residual exceeds epsilon, or None.
    """
    drift = abs(drift)
    first = attack_start // window
    for w in range(first, (horizon // window) + 1):
        m = max(0, attack_start - w * window)
        k = window - m  # ticks of the window with the freeze active
        mean = drift * k * (k - 1) / (2 * window)
        if mean > epsilon:
            return (w + 1) * window - 1
    return None
