"""Detector placements.

The same invariant set runs in two places:

* ``plc`` placement: distributed across the controllers, each invariant
  evaluating on its PLC's register file (including remote-polled tags).
* ``historian`` placement: centralized, every invariant evaluating on the
  latest values the historian has stored.

What each placement can and cannot see is the whole story: a forged
level-1 feed to the historian is invisible at the PLCs and vice versa.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invariants import Alarm, InvariantEngine, InvariantSet

PLACEMENTS = ("plc", "historian")


@dataclass
class Detector:
    placement: str
    engine: InvariantEngine

    def __post_init__(self):
        if self.placement not in PLACEMENTS:
            raise ValueError(f"unknown placement {self.placement!r}")

    @classmethod
    def at_plcs(cls, invariants: InvariantSet) -> "Detector":
        return cls("plc", InvariantEngine(invariants))

    @classmethod
    def at_historian(cls, invariants: InvariantSet) -> "Detector":
        return cls("historian", InvariantEngine(invariants))

    def evaluate(self, tick: int, views: dict) -> list[Alarm]:
        return self.engine.evaluate(tick, views)

    @property
    def skips(self) -> dict:
        return self.engine.skips


def detected(alarms: list[Alarm], start: int, end: int, margin: int) -> bool:
    """True if any alarm falls inside [start, end + margin]."""
    return any(start <= a.tick <= end + margin for a in alarms)
