"""Sequential consistency and linearizability by witness search.

Both checkers merge the thread projections depth-first, stepping the spec
oracle as events are emitted, and remember failed ``(consumed counts, spec
state)`` pairs. Linearizability additionally keeps every return that
preceded an invocation in the source ahead of it in the witness.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Hashable, List, Optional, Set, Tuple

from consistency_lens.checkers.verdict import SearchStats, Verdict
from consistency_lens.config import DEFAULT_BUDGET, SearchBudget
from consistency_lens.errors import PreconditionError
from consistency_lens.knowledge.indist import AgentGroup, group_indist, release_thresholds
from consistency_lens.model.events import Event, Trace, duplicate_events, has_calls, project, split_calls, threads
from consistency_lens.spec.oracle import REJECT, SpecOracle, spec_member


def _merge_search(
    E: Trace,
    spec: SpecOracle,
    observer: bool,
    budget: Optional[SearchBudget],
    first: Optional[int] = None,
) -> Verdict:
    clock = (budget or DEFAULT_BUDGET).start()
    order = threads(E)
    projections = [project(E, t).events for t in order]
    release = release_thresholds(E, order) if observer else None
    failed: Set[Tuple[Tuple[int, ...], Hashable]] = set()
    counts = [0] * len(order)
    emitted: List[Event] = []
    leaves = 0

    def dfs(state: Hashable) -> bool:
        nonlocal leaves
        clock.tick()
        if all(c == len(p) for c, p in zip(counts, projections)):
            leaves += 1
            return spec.accepting(state)
        key = (tuple(counts), state)
        if key in failed:
            return False
        for k, proj in enumerate(projections):
            if counts[k] == len(proj):
                continue
            if first is not None and not emitted and k != first:
                continue
            if release is not None and any(counts[u] < n for u, n in enumerate(release[k][counts[k]])):
                continue
            event = proj[counts[k]]
            nxt = spec.step(state, event)
            if nxt is REJECT:
                continue
            counts[k] += 1
            emitted.append(event)
            if dfs(nxt):
                return True
            emitted.pop()
            counts[k] -= 1
        failed.add(key)
        return False

    found = dfs(spec.initial())
    stats = SearchStats.of(clock, leaves)
    if found:
        return Verdict(True, witness=Trace(tuple(emitted)), stats=stats)
    return Verdict(False, stats=stats)


def _search(E: Trace, spec: SpecOracle, observer: bool, budget: Optional[SearchBudget], jobs: int) -> Verdict:
    """Serial search, or one worker per first-emitted thread when ``jobs > 1``.

    Branches are read back in thread order, so the witness is the one the
    serial search finds. Each branch gets the full node budget.
    """
    branches = len(threads(E))
    if jobs <= 1 or branches < 2:
        return _merge_search(E, spec, observer, budget)
    with ProcessPoolExecutor(max_workers=min(jobs, branches)) as pool:
        verdicts = list(pool.map(partial(_merge_search, E, spec, observer, budget), range(branches)))
    stats = SearchStats(
        nodes=sum(v.stats.nodes for v in verdicts),
        witnesses=sum(v.stats.witnesses for v in verdicts),
        elapsed_ms=max(v.stats.elapsed_ms for v in verdicts),
    )
    for verdict in verdicts:
        if verdict.consistent:
            return Verdict(True, witness=verdict.witness, stats=stats)
    return Verdict(False, stats=stats)


def check_sc(E: Trace, spec: SpecOracle, budget: Optional[SearchBudget] = None, jobs: int = 1) -> Verdict:
    """Sequential consistency: some interleaving of the projections meets ``spec``."""
    return _search(E, spec, False, budget, jobs)


def lin_view(E: Trace) -> Trace:
    """The split, duplicate-free form of ``E`` that linearizability works on."""
    if has_calls(E):
        E = split_calls(E)
    duplicates = duplicate_events(E)
    if duplicates:
        listed = ", ".join(str(e) for e in duplicates)
        raise PreconditionError(f"linearizability needs unique events; repeated: {listed}")
    return E


def check_lin(E: Trace, spec: SpecOracle, budget: Optional[SearchBudget] = None, jobs: int = 1) -> Verdict:
    """Linearizability: as :func:`check_sc`, keeping the source's real-time order.

    Combined calls are split into adjacent invocation/return pairs first.
    """
    return _search(lin_view(E), spec, True, budget, jobs)


def validate_witness(E: Trace, W: Trace, spec: SpecOracle, observer: bool = False) -> bool:
    if observer:
        E = lin_view(E)
    group = AgentGroup.all_threads(include_observer=observer)
    return group_indist(E, len(E), W, len(W), group) and spec_member(spec, W)
