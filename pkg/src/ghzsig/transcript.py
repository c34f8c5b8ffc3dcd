"""Append-only log of what crossed each channel."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

from .errors import InvalidArgumentError


class Party(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"
    TRENT = "Trent"
    EVE = "Eve"


class Kind(enum.Enum):
    QUBIT = "Qubit"
    CLASSICAL_BIT = "ClassicalBit"


@dataclass(frozen=True)
class Entry:
    sender: Party
    receiver: Party
    kind: Kind
    count: int
    label: str


@dataclass
class Transcript:
    entries: list[Entry] = field(default_factory=list)
    totals: Counter = field(default_factory=Counter)

    def log(self, sender: Party, receiver: Party, kind: Kind, count: int, label: str = "") -> Entry:
        if sender == receiver:
            raise InvalidArgumentError("a party cannot send to itself")
        if count < 0:
            raise InvalidArgumentError(f"negative count {count}")
        entry = Entry(sender, receiver, kind, int(count), label)
        self.entries.append(entry)
        self.totals[sender, receiver, kind] += entry.count
        return entry

    def total(self, sender: Party, receiver: Party, kind: Kind = Kind.QUBIT) -> int:
        return self.totals[sender, receiver, kind]

    def sent_by(self, party: Party, kind: Kind = Kind.QUBIT) -> int:
        return sum(e.count for e in self.entries if e.sender == party and e.kind == kind)

    def received_by(self, party: Party, kind: Kind = Kind.QUBIT) -> int:
        return sum(e.count for e in self.entries if e.receiver == party and e.kind == kind)

    def totals_dict(self) -> dict[str, int]:
        """Totals keyed like ``"Alice->Bob:Qubit"``, in first-seen order."""
        return {f"{s.value}->{r.value}:{k.value}": n for (s, r, k), n in self.totals.items()}

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "from": e.sender.value,
                    "to": e.receiver.value,
                    "kind": e.kind.value,
                    "count": e.count,
                    "label": e.label,
                }
                for e in self.entries
            ],
            "totals": self.totals_dict(),
        }
