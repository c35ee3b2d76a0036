"""Eventual-consistency vocabulary: logs, k_log, validLog, result, network rules.

Knowledge is tracked per event position. ``k_log`` reports the set of known
actions, while the canonical log keeps exactly the known *events* in trace
order, so an identical action performed by another thread is never treated as
known unless it was forwarded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import (
    AbstractSet,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from consistency_lens.errors import PreconditionError
from consistency_lens.model.events import (
    Action,
    AgentId,
    Com,
    Event,
    Fwd,
    Qu,
    Trace,
    Up,
    act_seq,
    check_index,
    is_subsequence,
    revision_of,
    threads,
)
from consistency_lens.model.state import (
    S0,
    Query,
    RevisionId,
    State,
    Value,
    interpret_query,
    interpret_update,
)

Revision = Tuple[AgentId, RevisionId]


@dataclass(frozen=True)
class Log:
    actions: Tuple[Action, ...] = ()

    def __iter__(self):
        return iter(self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __contains__(self, action: object) -> bool:
        return action in self.actions

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.actions) or "ε"


def check_revision_discipline(E: Trace) -> None:
    """Raise unless ``E`` uses EC actions with per-thread revision discipline.

    Within a thread each revision id forms one contiguous block, a commit
    closes its block, and a closed revision id is never reused.
    """
    current: Dict[AgentId, Optional[RevisionId]] = {}
    closed: Dict[AgentId, Set[RevisionId]] = {}
    for j, e in enumerate(E.events, start=1):
        action = e.action
        if e.agent.is_env:
            continue
        rev = revision_of(action)
        if rev is None:
            raise PreconditionError(f"position {j}: {action.kind} is not an eventual-consistency action")
        t = e.agent
        done = closed.setdefault(t, set())
        if rev in done:
            raise PreconditionError(f"position {j}: {t} reuses committed revision {rev}")
        open_rev = current.get(t)
        if open_rev is not None and open_rev != rev:
            raise PreconditionError(f"position {j}: {t} starts revision {rev} before committing {open_rev}")
        if isinstance(action, Com):
            done.add(rev)
            current[t] = None
        else:
            current[t] = rev


def revision_classes(E: Trace) -> Dict[Revision, List[int]]:
    """Positions of each ``(thread, id)`` revision, in trace order."""
    classes: Dict[Revision, List[int]] = {}
    for j, e in enumerate(E.events, start=1):
        rev = revision_of(e.action)
        if rev is not None and not e.agent.is_env:
            classes.setdefault((e.agent, rev), []).append(j)
    return classes


def committed_revisions(E: Trace) -> FrozenSet[Revision]:
    return frozenset((e.agent, e.action.rev) for e in E.events if isinstance(e.action, Com))


def program_order(E: Trace) -> FrozenSet[Tuple[int, int]]:
    """``≺_p`` over positions of thread events."""
    by_thread: Dict[AgentId, List[int]] = {}
    for j, e in enumerate(E.events, start=1):
        if not e.agent.is_env:
            by_thread.setdefault(e.agent, []).append(j)
    return frozenset(
        (a, b) for positions in by_thread.values() for x, a in enumerate(positions) for b in positions[x + 1:]
    )


def forward_candidates(E: Trace) -> Tuple[Event, ...]:
    """One forward per (sender, receiver, committed revision), receiver ≠ sender."""
    ts = threads(E)
    candidates: List[Event] = []
    for e in E.events:
        if isinstance(e.action, Com):
            for receiver in ts:
                if receiver != e.agent:
                    candidates.append(Event.env(Fwd(e.agent, receiver, e.action.rev)))
    return tuple(candidates)


@dataclass(frozen=True)
class Knowledge:
    """Known event positions per thread after a prefix of a trace.

    ``snapshots`` keeps what a thread knew at each of its commits; a forward
    of that revision hands the snapshot to the receiver.
    """

    known: Mapping[AgentId, FrozenSet[int]] = field(default_factory=dict)
    snapshots: Mapping[Revision, FrozenSet[int]] = field(default_factory=dict)

    def of(self, t: AgentId) -> FrozenSet[int]:
        return self.known.get(t, frozenset())

    def advance(self, position: int, event: Event) -> "Knowledge":
        action = event.action
        if isinstance(action, Fwd):
            snapshot = self.snapshots.get((action.sender, action.rev))
            if snapshot is None:
                return self
            known = dict(self.known)
            known[action.receiver] = self.of(action.receiver) | snapshot
            return Knowledge(known, self.snapshots)
        t = event.agent
        mine = self.of(t) | {position}
        known = dict(self.known)
        known[t] = mine
        snapshots = self.snapshots
        if isinstance(action, Com):
            snapshots = dict(self.snapshots)
            key = (t, action.rev)
            snapshots[key] = snapshots.get(key, frozenset()) | mine
        return Knowledge(known, snapshots)


def knowledge_at(E: Trace, i: int) -> Knowledge:
    check_index(E, i)
    knowledge = Knowledge()
    for j, e in enumerate(E.events[:i], start=1):
        knowledge = knowledge.advance(j, e)
    return knowledge


def known_events(E: Trace, i: int, t: AgentId) -> FrozenSet[int]:
    """Positions (1-based) of the events ``t`` knows about at ``i``."""
    return knowledge_at(E, i).of(t)


def k_log(E: Trace, i: int, t: AgentId) -> FrozenSet[Action]:
    return frozenset(E.at(j).action for j in known_events(E, i, t))


def log_of(E: Trace, positions: AbstractSet[int]) -> Log:
    return Log(tuple(E.at(j).action for j in sorted(positions)))


def canonical_log(E: Trace, i: int, t: AgentId) -> Log:
    """``L*``: the known events of ``t`` at ``i``, in trace order."""
    return log_of(E, known_events(E, i, t))


def consistent(E: Trace, i: int, L: Log) -> bool:
    check_index(E, i)
    return is_subsequence(L.actions, act_seq(E[:i]))


def valid_log(E: Trace, i: int, t: AgentId, L: Log) -> bool:
    """``L`` lists exactly the actions ``t`` knows at ``i``, in an order ``E`` allows.

    Logs hold actions, not events, so the valid log is unique only when no
    action repeats in ``E``; with repeats, several orders can qualify.
    """
    return set(L.actions) == k_log(E, i, t) and consistent(E, i, L)


Order = Union[Sequence[Action], AbstractSet[Tuple[Action, Action]]]


def _linearize(actions: AbstractSet[Action], order: Order) -> List[Action]:
    if not isinstance(order, AbstractSet):
        listed = [a for a in order if a in actions]
        if set(listed) != set(actions) or len(listed) != len(set(listed)):
            raise PreconditionError("order does not list every action exactly once")
        return listed
    # a strict total order as a relation: rank by number of predecessors
    rank = {a: 0 for a in actions}
    for a, b in order:
        if a in rank and b in rank:
            rank[b] += 1
    listed = sorted(actions, key=lambda a: rank[a])
    if sorted(rank.values()) != list(range(len(listed))):
        raise PreconditionError("order is not a strict total order on the actions")
    return listed


def apply(actions: AbstractSet[Action], order: Order, s: State = S0) -> State:
    """Apply the updates in ``actions`` to ``s`` in the given order."""
    for action in _linearize(actions, order):
        if isinstance(action, Up):
            s = interpret_update(action.update, s)
    return s


def apply_log(actions: Iterable[Action], s: State = S0) -> State:
    for action in actions:
        if isinstance(action, Up):
            s = interpret_update(action.update, s)
    return s


def result(q: Query, L: Log, r: Value) -> bool:
    value = interpret_query(q, apply_log(L.actions))
    return value == r and isinstance(value, bool) == isinstance(r, bool)


def _is_forward_to(e: Event, t: AgentId) -> bool:
    return isinstance(e.action, Fwd) and e.action.receiver == t


def atomic_trans(E: Trace) -> bool:
    """Revisions travel as indivisible bundles.

    A committed revision occupies one contiguous block of the trace ending in
    its commit, no revision continues after its commit, and no forward reaches
    a thread while one of its revisions is open.
    """
    classes = revision_classes(E)
    commits: Dict[Revision, int] = {}
    for j, e in enumerate(E.events, start=1):
        if isinstance(e.action, Com):
            commits.setdefault((e.agent, e.action.rev), j)
    for (t, rev), positions in classes.items():
        first = positions[0]
        commit = commits.get((t, rev))
        if commit is None:
            end = len(E)
        else:
            if positions[-1] != commit:
                return False
            end = commit
            if positions != list(range(first, commit + 1)):
                return False
        if any(_is_forward_to(e, t) for e in E.events[first:end]):
            return False
    return True


def forwards_committed(E: Trace) -> bool:
    """Every forward of (t, id) is preceded by t's commit of id."""
    committed: Set[Revision] = set()
    for e in E.events:
        if isinstance(e.action, Com):
            committed.add((e.agent, e.action.rev))
        elif isinstance(e.action, Fwd):
            if (e.action.sender, e.action.rev) not in committed:
                return False
    return True


def alive(E: Trace) -> bool:
    """No thread of a finite trace commits infinitely often; vacuously true."""
    return True


def network_ok(E: Trace) -> bool:
    return atomic_trans(E) and forwards_committed(E) and alive(E)


def query_results_ok(E: Trace) -> bool:
    """Every query is justified by its thread's canonical log."""
    knowledge = Knowledge()
    for j, e in enumerate(E.events, start=1):
        knowledge = knowledge.advance(j, e)
        if isinstance(e.action, Qu):
            L = log_of(E, knowledge.of(e.agent))
            if not result(e.action.query, L, e.action.result):
                return False
    return True


def correct_evc(E: Trace) -> bool:
    return network_ok(E) and query_results_ok(E)


@dataclass(frozen=True)
class OrderCertificate:
    """Visibility and arbitration over the positions of a trace's non-fwd events.

    ``arbitration`` lists the positions in arbitration order; ``visibility``
    holds ``(a, b)`` pairs meaning the event at ``a`` is visible to ``b``.
    """

    visibility: FrozenSet[Tuple[int, int]]
    arbitration: Tuple[int, ...]

    def arbitration_pairs(self) -> FrozenSet[Tuple[int, int]]:
        order = self.arbitration
        return frozenset((a, b) for x, a in enumerate(order) for b in order[x + 1:])


def _factors(relation: AbstractSet[Tuple[int, int]], rev_of: Mapping[int, Revision], members: Mapping[Revision, List[int]]) -> bool:
    for a, b in relation:
        ra, rb = rev_of[a], rev_of[b]
        if ra == rb:
            continue
        if any((x, y) not in relation for x in members[ra] for y in members[rb]):
            return False
    return True


def certificate_violations(E: Trace, cert: OrderCertificate) -> List[str]:
    """Names of the eventual-consistency conditions ``cert`` breaks on ``E``.

    The liveness condition is vacuous on finite traces and never reported.
    """
    problems: List[str] = []
    events = {j: e for j, e in enumerate(E.events, start=1) if not e.agent.is_env}
    if sorted(cert.arbitration) != sorted(events):
        return ["arbitration is not a total order on the non-fwd events"]
    vis = cert.visibility
    arb = cert.arbitration_pairs()
    if any(a == b or a not in events or b not in events for a, b in vis):
        problems.append("visibility is not irreflexive on the non-fwd events")
    if any((a, c) not in vis for a, b in vis for b2, c in vis if b == b2):
        problems.append("visibility is not transitive")
    if not vis <= arb:
        problems.append("arbitration does not extend visibility")
    if not program_order(E) <= vis:
        problems.append("visibility does not contain program order")
    rank = {p: k for k, p in enumerate(cert.arbitration)}
    for j, e in events.items():
        if isinstance(e.action, Qu):
            seen = sorted((a for a, b in vis if b == j), key=rank.__getitem__)
            value = interpret_query(e.action.query, apply_log(E.at(a).action for a in seen))
            if value != e.action.result or isinstance(value, bool) != isinstance(e.action.result, bool):
                problems.append(f"query at position {j} is not justified by its visible updates")
    members = revision_classes(E)
    rev_of = {p: rev for rev, positions in members.items() for p in positions}
    if not (_factors(vis, rev_of, members) and _factors(arb, rev_of, members)):
        problems.append("orders do not factor over revisions")
    committed = committed_revisions(E)
    if any(rev_of[a] not in committed and events[a].agent != events[b].agent for a, b in vis):
        problems.append("an uncommitted revision is visible to another thread")
    return problems
