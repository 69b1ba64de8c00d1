"""Check reports: per-axiom verdicts with optional counterexamples."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np


def rational_json(x) -> dict:
    x = Fraction(x)
    return {"n": x.numerator, "d": x.denominator}


def element_json(e) -> dict:
    """JSON form of a GradedElement witness: a list of monomial terms."""
    return {
        "kind": "element",
        "terms": [
            {"up": list(m.up), "down": list(m.down), "c": rational_json(c)} for m, c in e.monomials()
        ],
    }


def entry_json(index, value, kind="entry") -> dict:
    return {"kind": kind, "index": [int(i) for i in index], "value": rational_json(value)}


def array_witness(arr: np.ndarray, kind: str = "entry") -> Optional[dict]:
    """First nonzero entry of an exact array, or None if it vanishes."""
    for idx, x in np.ndenumerate(arr):
        if x != 0:
            return entry_json(idx, x, kind)
    return None


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class CheckReport:
    title: str
    verdicts: list[Verdict] = field(default_factory=list)
    classification: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, witness=None, detail: str = "") -> bool:
        self.verdicts.append(Verdict(name, bool(passed), witness, detail))
        return bool(passed)

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for v in other.verdicts:
            self.verdicts.append(Verdict(prefix + v.name, v.passed, v.witness, v.detail))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def __getitem__(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(v.name == name for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    def to_dict(self) -> dict:
        out = {
            "title": self.title,
            "passed": self.passed,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }
        if self.classification is not None:
            out["classification"] = self.classification
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def lines(self) -> list[str]:
        head = f"{self.title}: {'PASS' if self.passed else 'FAIL'}"
        if self.classification:
            head += f" [{self.classification}]"
        body = [f"  {'ok  ' if v.passed else 'FAIL'} {v.name}" + (f"  ({v.detail})" if v.detail else "")
                for v in self.verdicts]
        return [head, *body, *(f"  note: {n}" for n in self.notes)]

    def __str__(self) -> str:
        return "\n".join(self.lines())
