"""Pass/fail records produced by the verification routines."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RelationItem:
    name: str
    passed: bool
    residual: float | None = None  # None for exact checks

    def to_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "residual": self.residual}


@dataclass(frozen=True)
class RelationReport:
    title: str
    items: tuple[RelationItem, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    @property
    def failures(self) -> tuple[RelationItem, ...]:
        return tuple(it for it in self.items if not it.passed)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, name: str) -> RelationItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def __add__(self, other: "RelationReport") -> "RelationReport":
        return RelationReport(f"{self.title}+{other.title}", self.items + other.items)

    def max_residual(self) -> float | None:
        vals = [it.residual for it in self.items if it.residual is not None]
        return max(vals) if vals else None
