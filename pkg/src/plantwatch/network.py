"""Message delivery with tamper hooks, the Historian store, and the SCADA view.

Level 0 carries sensor/actuator values from a stage's remote I/O to its
PLC; Level 1 carries PLC register values to the Historian, the SCADA
workstation, and peer PLCs.  Every network attack is realized as a hook
attached to one of these channels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .tags import TAGS, decode_value, encode_value


@dataclass(frozen=True)
class Message:
    tag: str
    value: object
    tick: int


@dataclass
class TamperHook:
    kind: str                 # rewrite | offset | drop | delay | disconnect
    window: tuple[int, int]   # [start, end] ticks, inclusive
    tag: str | None = None    # None matches every tag (drop/disconnect)
    value: object = None      # rewrite constant / offset delta / delay ticks

    def active(self, tick: int) -> bool:
        return self.window[0] <= tick <= self.window[1]

    def apply(self, message: Message) -> Message | None:
        if self.kind == "disconnect":
            return None
        if self.tag is not None and message.tag != self.tag:
            return message
        if self.kind == "drop":
            return None
        if self.kind == "rewrite":
            return Message(message.tag, self.value, message.tick)
        if self.kind == "offset":
            return Message(message.tag, message.value + self.value, message.tick)
        return message  # delay handled by the channel queue


@dataclass
class Channel:
    channel_id: str
    level: int
    source: str
    destination: str
    hooks: list[TamperHook] = field(default_factory=list)
    _delayed: list = field(default_factory=list)

    def install(self, hook: TamperHook) -> None:
        self.hooks.append(hook)

    def remove_expired(self, tick: int) -> None:
        self.hooks = [h for h in self.hooks if tick <= h.window[1]]

    def deliver(self, message: Message) -> Message | None:
        """Run the message through active hooks, in installation order."""
        for hook in self.hooks:
            if not hook.active(message.tick):
                continue
            if hook.kind == "delay" and (hook.tag is None or hook.tag == message.tag):
                self._delayed.append((message.tick + int(hook.value), message))
                return None
            message = hook.apply(message)
            if message is None:
                return None
        return message

    def matured(self, tick: int) -> list[Message]:
        due = [m for release, m in self._delayed if release <= tick]
        self._delayed = [(r, m) for r, m in self._delayed if r > tick]
        return due


class DuplicateTickError(ValueError):
    pass


class UnknownTagError(KeyError):
    pass


@dataclass
class HistorianStore:
    """Append-only per-tag time series of values as delivered over Level 1."""

    series: dict = field(default_factory=dict)
    tamper_log: list = field(default_factory=list)
    _mutations: list = field(default_factory=list)  # (window, tag, value)
    _last_tick: int | None = None

    def add_mutation(self, window: tuple[int, int], tag: str, value) -> None:
        """Direct Historian compromise: stored values inside the window are
        replaced on arrival.  Recorded in tamper_log for test oracles only."""
        self._mutations.append((window, tag, value))

    def append(self, tick: int, snapshot: dict) -> None:
        if self._last_tick is not None and tick <= self._last_tick:
            raise DuplicateTickError(f"snapshot for tick {tick} already stored")
        self._last_tick = tick
        for tag, value in snapshot.items():
            for window, mtag, mvalue in self._mutations:
                if mtag == tag and window[0] <= tick <= window[1]:
                    self.tamper_log.append((tick, tag, value, mvalue))
                    value = mvalue
            self.series.setdefault(tag, []).append((tick, value))

    def query(self, tag: str, window: tuple[int, int]) -> list[tuple[int, object]]:
        if tag not in self.series:
            raise UnknownTagError(f"historian has no series for {tag}")
        lo, hi = window
        return [(t, v) for t, v in self.series[tag] if lo <= t <= hi]

    def latest(self, tag: str):
        entries = self.series.get(tag)
        return entries[-1][1] if entries else None

    def row(self, tick: int) -> dict:
        return {tag: v for tag, entries in self.series.items()
                for t, v in entries if t == tick}


class HistorianView:
    """Latest-value view over the historian, for the at-historian detector."""

    def __init__(self, store: HistorianStore):
        self._store = store

    def get(self, tag: str):
        return self._store.latest(tag)


@dataclass
class ScadaView:
    display: dict = field(default_factory=dict)
    stale_age: dict = field(default_factory=dict)
    defaced: bool = False

    def update(self, tick: int, delivered: dict, expected: int) -> None:
        self.defaced = expected > 0 and not delivered
        for tag, value in delivered.items():
            self.display[tag] = value
            self.stale_age[tag] = 0
        for tag in self.display:
            if tag not in delivered:
                self.stale_age[tag] = self.stale_age.get(tag, 0) + 1


def historian_columns() -> list[str]:
    return list(TAGS)


def export_csv(store: HistorianStore, path) -> None:
    """One row per tick, header ``tick,<tag>,...`` in stable tag order."""
    columns = historian_columns()
    ticks = sorted({t for entries in store.series.values() for t, _ in entries})
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick"] + columns)
        values = {tag: dict(store.series.get(tag, [])) for tag in columns}
        last = {tag: None for tag in columns}
        for tick in ticks:
            row = [tick]
            for tag in columns:
                if tick in values[tag]:
                    last[tag] = values[tag][tick]
                row.append("" if last[tag] is None else repr(encode_value(tag, last[tag])))
            writer.writerow(row)


def load_csv(path) -> tuple[list[str], list[tuple[int, dict]]]:
    """Read a historian CSV; returns (columns, rows) with decoded values."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "tick":
            raise ValueError("historian CSV must start with a 'tick' column")
        columns = header[1:]
        rows = []
        for raw in reader:
            tick = int(raw[0])
            row = {}
            for tag, cell in zip(columns, raw[1:]):
                if cell != "" and tag in TAGS:
                    row[tag] = decode_value(tag, float(cell))
            rows.append((tick, row))
    return columns, rows
