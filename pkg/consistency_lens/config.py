"""Configuration values for consistency-lens."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from consistency_lens.errors import BudgetExceeded


class BudgetClock:
    """Counts search nodes and wall time against a :class:`SearchBudget`."""

    def __init__(self, budget: "SearchBudget") -> None:
        self.budget = budget
        self.nodes = 0
        self._started = time.monotonic()

    @property
    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self._started) * 1000)

    def tick(self) -> None:
        self.nodes += 1
        if self.budget.nodes is not None and self.nodes > self.budget.nodes:
            raise BudgetExceeded("nodes", self.budget.nodes, self.nodes)
        # checking the clock on every node is measurable in tight loops
        if self.budget.millis is not None and self.nodes % 256 == 0:
            if self.elapsed_ms > self.budget.millis:
                raise BudgetExceeded("millis", self.budget.millis, self.nodes)


@dataclass(frozen=True)
class SearchBudget:
    nodes: Optional[int]
    millis: Optional[int] = None

    def start(self) -> BudgetClock:
        return BudgetClock(self)


DEFAULT_BUDGET = SearchBudget(nodes=2_000_000, millis=None)
UNLIMITED_BUDGET = SearchBudget(nodes=None, millis=None)

SEMANTICS_LITERAL_U = "literal-u"
SEMANTICS_FUTURE_U = "future-u"
SEMANTICS_ALIASES: Dict[str, str] = {"paper-literal": SEMANTICS_LITERAL_U}
SEMANTICS_CHOICES: List[str] = [SEMANTICS_LITERAL_U, SEMANTICS_FUTURE_U, *SEMANTICS_ALIASES]
DEFAULT_SEMANTICS = SEMANTICS_FUTURE_U

TRACE_HEADER_MAGIC = "#consistency-trace"
TRACE_FORMAT_VERSION = "v1"

SPEC_CHOICES: List[str] = ["register", "none"]
DEFAULT_SPEC = "register"

DEFAULT_THREADS: Tuple[str, ...] = ("t1", "t2")
REGISTER_VALUES: Tuple[int, ...] = (0, 1)
EC_VARIABLES: Tuple[str, ...] = ("x",)

SC_THEOREM_MAX_EVENTS = 6
LIN_THEOREM_MAX_EVENTS = 6
EC_THEOREM_MAX_EVENTS = 5
GENERATED_TRACE_COUNT = 1000
DEFAULT_SEED = 20240224

EXIT_CONSISTENT = 0
EXIT_INCONSISTENT = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
