"""Checker results."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from consistency_lens.config import BudgetClock
from consistency_lens.errors import PreconditionError
from consistency_lens.model.events import Trace
from consistency_lens.spec.evc import OrderCertificate


@dataclass(frozen=True)
class SearchStats:
    nodes: int = 0
    witnesses: int = 0
    elapsed_ms: int = 0

    @classmethod
    def of(cls, clock: BudgetClock, witnesses: int) -> "SearchStats":
        return cls(clock.nodes, witnesses, clock.elapsed_ms)


@dataclass(frozen=True)
class Verdict:
    consistent: bool
    witness: Optional[Trace] = None
    certificate: Optional[OrderCertificate] = None
    stats: SearchStats = field(default_factory=SearchStats)

    def __post_init__(self) -> None:
        evidence = (self.witness is not None) + (self.certificate is not None)
        if self.consistent and evidence != 1:
            raise PreconditionError("a consistent verdict carries exactly one witness or certificate")
        if not self.consistent and evidence:
            raise PreconditionError("an inconsistent verdict carries no evidence")
