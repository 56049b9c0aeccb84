"""Answers returned by the decision procedures and the brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kripke import PointedStructure

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"
NONE_UP_TO = "none-up-to"


@dataclass(frozen=True)
class Verdict:
    """``status`` is one of sat, unsat, unknown or none-up-to.

    A sat verdict carries a verified model; none-up-to is the oracle's way of
    saying that no model with at most ``max_size`` worlds exists.
    """

    status: str
    model: Optional[PointedStructure] = None
    reason: str = ""
    max_size: Optional[int] = None

    @classmethod
    def sat(cls, model: PointedStructure) -> "Verdict":
        return cls(SAT, model)

    @classmethod
    def unsat(cls, reason: str = "") -> "Verdict":
        return cls(UNSAT, reason=reason)

    @classmethod
    def unknown(cls, reason: str) -> "Verdict":
        return cls(UNKNOWN, reason=reason)

    @classmethod
    def none_up_to(cls, k: int) -> "Verdict":
        return cls(NONE_UP_TO, reason=f"no model with at most {k} worlds", max_size=k)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT

    @property
    def is_unknown(self) -> bool:
        return self.status == UNKNOWN

    def __str__(self):
        return self.status.upper()
