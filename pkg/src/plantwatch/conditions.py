"""Tiny predicate grammar shared by control rules and invariant definitions.

A predicate is a conjunction of atoms joined by ``&``::

    LIT101 <= T101.L & MV201 == Open
    MV101 in Open,Opening
    always

The right-hand side of an atom is a number, an actuator state name, or a
marker reference ``<tank>.<LL|L|H|HH>`` resolved against the plant config
at parse time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tags import TAGS

_OPS = ("<=", ">=", "==", "!=", "<", ">")
_MARKER_FIELDS = ("LL", "L", "H", "HH")


class MissingTagError(KeyError):
    """A predicate referenced a tag absent from the data view."""


@dataclass(frozen=True)
class Atom:
    tag: str
    op: str
    value: object  # float, str state, or tuple of str for "in"

    def holds(self, view) -> bool:
        got = view.get(self.tag)
        if got is None:
            raise MissingTagError(self.tag)
        if self.op == "in":
            return got in self.value
        if isinstance(self.value, str):
            if self.op == "==":
                return got == self.value
            if self.op == "!=":
                return got != self.value
            raise TypeError(f"ordering comparison against state {self.value!r}")
        got = float(got)
        return {
            "<=": got <= self.value,
            ">=": got >= self.value,
            "<": got < self.value,
            ">": got > self.value,
            "==": got == self.value,
            "!=": got != self.value,
        }[self.op]


@dataclass(frozen=True)
class Predicate:
    atoms: tuple[Atom, ...]
    text: str

    def holds(self, view) -> bool:
        return all(atom.holds(view) for atom in self.atoms)

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(a.tag for a in self.atoms)

    def __str__(self):
        return self.text


def _parse_rhs(raw: str, op: str, markers):
    raw = raw.strip()
    if op == "in":
        return tuple(part.strip() for part in raw.split(","))
    if "." in raw and raw.split(".", 1)[0].startswith("T") and raw.split(".", 1)[1] in _MARKER_FIELDS:
        tank, field = raw.split(".", 1)
        if markers is None or tank not in markers:
            raise ValueError(f"marker reference {raw!r} with no markers for {tank}")
        return float(getattr(markers[tank], field.lower()))
    try:
        return float(raw)
    except ValueError:
        return raw  # actuator state name


def parse_predicate(text: str, markers=None) -> Predicate:
    """Parse a conjunction; ``markers`` maps tank name to a MarkerSet."""
    text = text.strip()
    if text == "always":
        return Predicate((), "always")
    atoms = []
    for part in text.split("&"):
        part = part.strip()
        if " in " in part:
            tag, rhs = part.split(" in ", 1)
            op = "in"
        else:
            for op in _OPS:
                if op in part:
                    tag, rhs = part.split(op, 1)
                    break
            else:
                raise ValueError(f"cannot parse condition {part!r}")
        tag = tag.strip()
        if tag not in TAGS:
            raise ValueError(f"unknown tag {tag!r} in condition {part!r}")
        atoms.append(Atom(tag, op, _parse_rhs(rhs, op, markers)))
    return Predicate(tuple(atoms), text)
