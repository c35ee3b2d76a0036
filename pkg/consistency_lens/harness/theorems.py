"""Cross-checks between the order-based and knowledge-based formulations.

Each suite runs a per-trace case over a corpus and collects the traces on
which the two sides disagree. Cases are module-level functions so they can
be fanned out over a process pool; results keep corpus order.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from itertools import permutations
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from consistency_lens.checkers.detect import detect_lin, detect_sc
from consistency_lens.checkers.eventual import (
    check_ec_axiomatic,
    check_ec_epistemic,
    validate_certificate,
    validate_ec_witness,
)
from consistency_lens.checkers.search import check_lin, check_sc, validate_witness
from consistency_lens.config import (
    DEFAULT_SEED,
    EC_THEOREM_MAX_EVENTS,
    GENERATED_TRACE_COUNT,
    LIN_THEOREM_MAX_EVENTS,
    SC_THEOREM_MAX_EVENTS,
)
from consistency_lens.errors import ConfigurationError
from consistency_lens.harness.generate import all_ec_traces, all_register_traces, random_register_trace
from consistency_lens.knowledge.formulas import correct
from consistency_lens.knowledge.indist import AgentGroup
from consistency_lens.knowledge.logic import Evaluator, Not, axiom_check
from consistency_lens.model.events import Inv, Ret, Trace, project, threads
from consistency_lens.spec.oracle import SpecOracle, spec_by_name, spec_member

Case = Callable[[Trace], Optional[str]]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checked: int
    failures: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


# -- brute-force oracles ------------------------------------------------------


def _same_projections(E: Trace, W: Trace) -> bool:
    return all(project(E, t) == project(W, t) for t in threads(E))


def brute_force_sc(E: Trace, spec: SpecOracle) -> bool:
    """Some permutation of ``E`` with the same projections is in ``spec``."""
    for events in set(permutations(E.events)):
        W = Trace(events)
        if _same_projections(E, W) and spec_member(spec, W):
            return True
    return False


def real_time_preserved(E: Trace, pi: Sequence[int]) -> bool:
    """Calls are never pulled before returns: ``pi`` maps 0-based positions."""
    n = len(E)
    for j in range(n):
        if not isinstance(E[j].action, Ret):
            continue
        for k in range(j + 1, n):
            if isinstance(E[k].action, Inv) and pi[j] >= pi[k]:
                return False
    return True


def brute_force_lin(E: Trace, spec: SpecOracle) -> bool:
    """Search explicit bijections ``pi`` from ``E``'s positions onto a witness."""
    n = len(E)
    for pi in permutations(range(n)):
        slots = [None] * n
        for j, target in enumerate(pi):
            slots[target] = E[j]
        W = Trace(tuple(slots))
        if _same_projections(E, W) and real_time_preserved(E, pi) and spec_member(spec, W):
            return True
    return False


# -- per-trace cases ----------------------------------------------------------


def sc_case(E: Trace, spec_name: str = "register") -> Optional[str]:
    spec = spec_by_name(spec_name)
    verdict = check_sc(E, spec)
    if verdict.consistent != brute_force_sc(E, spec):
        return f"check_sc={verdict.consistent}: {E}"
    if verdict.consistent and not validate_witness(E, verdict.witness, spec):
        return f"invalid witness {verdict.witness}: {E}"
    return None


def lin_case(E: Trace, spec_name: str = "register") -> Optional[str]:
    spec = spec_by_name(spec_name)
    verdict = check_lin(E, spec)
    if verdict.consistent != brute_force_lin(E, spec):
        return f"check_lin={verdict.consistent}: {E}"
    if verdict.consistent and not validate_witness(E, verdict.witness, spec, observer=True):
        return f"invalid witness {verdict.witness}: {E}"
    if verdict.consistent and not check_sc(E, spec).consistent:
        return f"linearizable but not sequentially consistent: {E}"
    return None


def ec_case(E: Trace) -> Optional[str]:
    axiomatic = check_ec_axiomatic(E)
    epistemic = check_ec_epistemic(E)
    if axiomatic.consistent != epistemic.consistent:
        return f"axiomatic={axiomatic.consistent} epistemic={epistemic.consistent}: {E}"
    if axiomatic.consistent and not validate_certificate(E, axiomatic.certificate):
        return f"invalid certificate: {E}"
    if epistemic.consistent and not validate_ec_witness(E, epistemic.witness):
        return f"invalid witness {epistemic.witness}: {E}"
    return None


GROUPS = {
    "threads": AgentGroup.all_threads(),
    "threads+obs": AgentGroup.all_threads(include_observer=True),
}


def axiom_case(E: Trace, axiom: str, group: str, spec_name: str = "register") -> Optional[str]:
    evaluator = Evaluator(spec=spec_by_name(spec_name))
    if axiom_check(E, GROUPS[group], Not(correct()), axiom, evaluator):
        return None
    return f"axiom {axiom} fails for {group}: {E}"


def detect_sc_case(E: Trace, spec_name: str = "register") -> Optional[str]:
    report = detect_sc(E, spec_by_name(spec_name))
    if report.positive_detected and report.negative_detected:
        return None
    return f"{report}: {E}"


def detect_lin_case(E: Trace, spec_name: str = "register") -> Optional[str]:
    report = detect_lin(E, spec_by_name(spec_name))
    if report.negative_detected:
        return None
    return f"{report}: {E}"


# -- suites -------------------------------------------------------------------


def run_case(name: str, case: Case, traces: Iterable[Trace], jobs: int = 1) -> SuiteResult:
    corpus = list(traces)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(case, corpus, chunksize=64))
    else:
        outcomes = [case(E) for E in corpus]
    return SuiteResult(name, len(corpus), tuple(o for o in outcomes if o is not None))


def generated_traces(count: int = GENERATED_TRACE_COUNT, seed: int = DEFAULT_SEED, max_events: int = 6) -> List[Trace]:
    """Split, duplicate-free register traces for the knowledge suites."""
    rng = random.Random(seed)
    return [random_register_trace(rng, max_events, split=True, unique=True) for _ in range(count)]


SUITES = ("sc", "lin", "ec", "axioms", "detect")


def run_suites(
    names: Sequence[str] = SUITES,
    max_events: Optional[int] = None,
    count: int = GENERATED_TRACE_COUNT,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
    spec_name: str = "register",
) -> List[SuiteResult]:
    results: List[SuiteResult] = []
    corpus: Optional[List[Trace]] = None
    for name in names:
        if name == "sc":
            bound = SC_THEOREM_MAX_EVENTS if max_events is None else max_events
            traces = all_register_traces(bound)
            results.append(run_case("sc-equivalence", partial(sc_case, spec_name=spec_name), traces, jobs))
        elif name == "lin":
            bound = LIN_THEOREM_MAX_EVENTS if max_events is None else max_events
            traces = all_register_traces(bound, split=True, unique_only=True)
            results.append(run_case("lin-equivalence", partial(lin_case, spec_name=spec_name), traces, jobs))
        elif name == "ec":
            bound = EC_THEOREM_MAX_EVENTS if max_events is None else max_events
            results.append(run_case("ec-equivalence", ec_case, all_ec_traces(bound), jobs))
        elif name == "axioms":
            corpus = corpus or generated_traces(count, seed)
            for axiom, group in (("T", "threads"), ("T", "threads+obs"), ("4", "threads"), ("4", "threads+obs"), ("5", "threads")):
                case = partial(axiom_case, axiom=axiom, group=group, spec_name=spec_name)
                results.append(run_case(f"axiom-{axiom}-{group}", case, corpus, jobs))
        elif name == "detect":
            corpus = corpus or generated_traces(count, seed)
            results.append(run_case("detect-sc", partial(detect_sc_case, spec_name=spec_name), corpus, jobs))
            results.append(run_case("detect-lin", partial(detect_lin_case, spec_name=spec_name), corpus, jobs))
        else:
            raise ConfigurationError(f"unknown suite {name!r}; choose from {list(SUITES)}")
    return results
