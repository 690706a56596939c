"""Outcome of a bounded-depth semi-decision."""

from __future__ import annotations

from dataclasses import dataclass, field

WITNESS = "witness"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Either a replayable witness or an honest "nothing found up to ``depth``"."""

    status: str
    depth: int
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (WITNESS, INCONCLUSIVE):
            raise ValueError(f"unknown verdict status {self.status!r}")

    @classmethod
    def witness(cls, depth: int, **evidence) -> "Verdict":
        return cls(WITNESS, depth, evidence)

    @classmethod
    def inconclusive(cls, depth: int, **evidence) -> "Verdict":
        return cls(INCONCLUSIVE, depth, evidence)

    @property
    def found(self) -> bool:
        return self.status == WITNESS
