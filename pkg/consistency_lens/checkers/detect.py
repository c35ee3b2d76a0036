"""Whether the threads (and the observer) can tell that a trace is consistent."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from consistency_lens.checkers.search import lin_view
from consistency_lens.knowledge.formulas import knows_threads, knows_threads_obs, lin, seq_cons
from consistency_lens.knowledge.logic import Evaluator, Formula, Not
from consistency_lens.model.events import Trace
from consistency_lens.spec.oracle import SpecOracle


@dataclass(frozen=True)
class DetectionReport:
    """Truth of a property ``P`` and of the group knowing ``P`` or ``¬P``."""

    name: str
    holds: bool
    knows_holds: bool
    knows_fails: bool

    @property
    def positive_detected(self) -> bool:
        """``P ↔ D(P)``."""
        return self.holds == self.knows_holds

    @property
    def negative_detected(self) -> bool:
        """``¬P ↔ D(¬P)``."""
        return (not self.holds) == self.knows_fails

    def __str__(self) -> str:
        prop = self.name if self.holds else f"¬{self.name}"
        knows = f"D({self.name})" if self.knows_holds else f"¬D({self.name})"
        return f"{prop} ∧ {knows}"


def _report(name: str, E: Trace, prop: Formula, knows, evaluator: Evaluator) -> DetectionReport:
    end = len(E)
    return DetectionReport(
        name=name,
        holds=evaluator.eval(E, end, prop),
        knows_holds=evaluator.eval(E, end, knows(prop)),
        knows_fails=evaluator.eval(E, end, knows(Not(prop))),
    )


def detect_sc(E: Trace, spec: SpecOracle, evaluator: Optional[Evaluator] = None) -> DetectionReport:
    return _report("seqCons", E, seq_cons(), knows_threads, evaluator or Evaluator(spec=spec))


def detect_lin(E: Trace, spec: SpecOracle, evaluator: Optional[Evaluator] = None) -> DetectionReport:
    return _report("Lin", lin_view(E), lin(), knows_threads_obs, evaluator or Evaluator(spec=spec))
