"""Eventual consistency: the order-based checker and the knowledge-based one.

The order-based search builds arbitration one revision at a time, choosing for
each revision which earlier revisions it sees. The knowledge-based search
interleaves the thread projections and inserts forwards of committed
revisions, each batch placed directly before an event of its receiver.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from consistency_lens.checkers.verdict import SearchStats, Verdict
from consistency_lens.config import DEFAULT_BUDGET, SearchBudget
from consistency_lens.errors import ConfigurationError
from consistency_lens.model.events import Com, Event, Qu, Trace, Up, project, revision_of, strip_env, threads
from consistency_lens.model.state import interpret_query, interpret_update
from consistency_lens.spec.evc import (
    Knowledge,
    OrderCertificate,
    Revision,
    apply_log,
    certificate_violations,
    check_revision_discipline,
    committed_revisions,
    correct_evc,
    forward_candidates,
    revision_classes,
)


def _closed_choices(
    own: FrozenSet[Revision], foreign: Sequence[Revision], vis: Dict[Revision, FrozenSet[Revision]]
) -> Iterator[FrozenSet[Revision]]:
    """Transitively closed visible sets, largest first."""
    for size in range(len(foreign), -1, -1):
        for chosen in combinations(foreign, size):
            seen = own | frozenset(chosen)
            if all(vis[r] <= seen for r in seen):
                yield seen


def check_ec_axiomatic(E: Trace, budget: Optional[SearchBudget] = None) -> Verdict:
    """Search for visibility and arbitration orders justifying every query.

    Positions in the certificate refer to ``E`` itself; forward events are
    ignored.
    """
    clock = (budget or DEFAULT_BUDGET).start()
    check_revision_discipline(E)
    members = revision_classes(E)
    committed = committed_revisions(E)
    order = threads(E)
    per_thread = [[rev for rev in members if rev[0] == t] for t in order]
    counts = [0] * len(order)
    placed: List[Revision] = []
    vis: Dict[Revision, FrozenSet[Revision]] = {}

    def queries_ok(rev: Revision, seen: FrozenSet[Revision]) -> bool:
        state = apply_log(E.at(p).action for r in placed if r in seen for p in members[r])
        for p in members[rev]:
            action = E.at(p).action
            if isinstance(action, Up):
                state = interpret_update(action.update, state)
            elif isinstance(action, Qu):
                value = interpret_query(action.query, state)
                if value != action.result or isinstance(value, bool) != isinstance(action.result, bool):
                    return False
        return True

    def dfs() -> bool:
        clock.tick()
        if len(placed) == len(members):
            return True
        for k, t in enumerate(order):
            if counts[k] == len(per_thread[k]):
                continue
            rev = per_thread[k][counts[k]]
            own = frozenset(per_thread[k][: counts[k]])
            foreign = [r for r in placed if r[0] != t and r in committed]
            for seen in _closed_choices(own, foreign, vis):
                if not queries_ok(rev, seen):
                    continue
                placed.append(rev)
                vis[rev] = seen
                counts[k] += 1
                if dfs():
                    return True
                counts[k] -= 1
                del vis[rev]
                placed.pop()
        return False

    if not dfs():
        return Verdict(False, stats=SearchStats.of(clock, 0))
    return Verdict(True, certificate=_certificate(members, placed, vis), stats=SearchStats.of(clock, 1))


def _certificate(
    members: Dict[Revision, List[int]], placed: Sequence[Revision], vis: Dict[Revision, FrozenSet[Revision]]
) -> OrderCertificate:
    arbitration = tuple(p for rev in placed for p in members[rev])
    pairs: Set[Tuple[int, int]] = set()
    for rev in placed:
        positions = members[rev]
        pairs.update((a, b) for x, a in enumerate(positions) for b in positions[x + 1:])
        for seen in vis[rev]:
            pairs.update((a, b) for a in members[seen] for b in positions)
    return OrderCertificate(frozenset(pairs), arbitration)


def validate_certificate(E: Trace, cert: OrderCertificate) -> bool:
    return not certificate_violations(E, cert)


def check_ec_epistemic(E: Trace, budget: Optional[SearchBudget] = None) -> Verdict:
    """Search for an indistinguishable trace satisfying ``correct_evc``.

    A committed revision is emitted as one block; a thread with an open
    revision receives nothing until it commits.
    """
    clock = (budget or DEFAULT_BUDGET).start()
    source = strip_env(E)
    check_revision_discipline(source)
    order = threads(source)
    index = {t: k for k, t in enumerate(order)}
    projections = [project(source, t).events for t in order]
    will_commit = committed_revisions(source)
    candidates = forward_candidates(source)
    counts = [0] * len(order)
    used = [False] * len(candidates)
    open_rev: List[Optional[int]] = [None] * len(order)
    done: Set[Revision] = set()
    emitted: List[Event] = []
    leaves = 0

    def usable(c: int, receiver: int) -> bool:
        fwd = candidates[c].action
        return (
            not used[c]
            and index[fwd.receiver] == receiver
            and (fwd.sender, fwd.rev) in done
            and open_rev[receiver] is None
            and counts[receiver] < len(projections[receiver])
        )

    def emit_thread(k: int, knowledge: Knowledge, block: Optional[int]) -> bool:
        event = projections[k][counts[k]]
        knowledge = knowledge.advance(len(emitted) + 1, event)
        action = event.action
        if isinstance(action, Qu):
            known = sorted(p for p in knowledge.of(event.agent) if p <= len(emitted))
            state = apply_log(emitted[p - 1].action for p in known)
            value = interpret_query(action.query, state)
            if value != action.result or isinstance(value, bool) != isinstance(action.result, bool):
                return False
        saved_open = open_rev[k]
        rev = revision_of(action)
        if isinstance(action, Com):
            open_rev[k] = None
            block = None
            done.add((event.agent, rev))
        elif open_rev[k] is None:
            open_rev[k] = rev
            if (event.agent, rev) in will_commit:
                block = k
        counts[k] += 1
        emitted.append(event)
        if dfs(knowledge, block, None, -1):
            return True
        emitted.pop()
        counts[k] -= 1
        if isinstance(action, Com):
            done.discard((event.agent, rev))
        open_rev[k] = saved_open
        return False

    def emit_forward(c: int, knowledge: Knowledge, receiver: int) -> bool:
        event = candidates[c]
        knowledge = knowledge.advance(len(emitted) + 1, event)
        used[c] = True
        emitted.append(event)
        if dfs(knowledge, None, receiver, c):
            return True
        emitted.pop()
        used[c] = False
        return False

    def dfs(knowledge: Knowledge, block: Optional[int], receiver: Optional[int], last: int) -> bool:
        nonlocal leaves
        clock.tick()
        if all(c == len(p) for c, p in zip(counts, projections)):
            leaves += 1
            return correct_evc(Trace(tuple(emitted)))
        if block is not None:
            return emit_thread(block, knowledge, block)
        if receiver is not None:
            for c in range(last + 1, len(candidates)):
                if usable(c, receiver) and emit_forward(c, knowledge, receiver):
                    return True
            return emit_thread(receiver, knowledge, None)
        for k in range(len(order)):
            if counts[k] < len(projections[k]) and emit_thread(k, knowledge, None):
                return True
        for c in range(len(candidates)):
            receiver_of = index[candidates[c].action.receiver]
            if usable(c, receiver_of) and emit_forward(c, knowledge, receiver_of):
                return True
        return False

    found = dfs(Knowledge(), None, None, -1)
    stats = SearchStats.of(clock, leaves)
    if found:
        return Verdict(True, witness=Trace(tuple(emitted)), stats=stats)
    return Verdict(False, stats=stats)


def validate_ec_witness(E: Trace, W: Trace) -> bool:
    source = strip_env(E)
    return all(project(source, t) == project(W, t) for t in threads(source) + threads(W)) and correct_evc(W)


EC_CHECKERS: Dict[str, Callable[..., Verdict]] = {
    "axiomatic": check_ec_axiomatic,
    "epistemic": check_ec_epistemic,
}


def check_ec(
    E: Trace, methods: Sequence[str], budget: Optional[SearchBudget] = None, jobs: int = 1
) -> Dict[str, Verdict]:
    """Run the named checkers, each in its own worker process when ``jobs > 1``."""
    unknown = [m for m in methods if m not in EC_CHECKERS]
    if unknown:
        raise ConfigurationError(f"unknown EC method(s) {unknown}; choose from {list(EC_CHECKERS)}")
    if jobs <= 1 or len(methods) < 2:
        return {m: EC_CHECKERS[m](E, budget) for m in methods}
    with ProcessPoolExecutor(max_workers=min(jobs, len(methods))) as pool:
        futures = {m: pool.submit(EC_CHECKERS[m], E, budget) for m in methods}
        return {m: future.result() for m, future in futures.items()}
