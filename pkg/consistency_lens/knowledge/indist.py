"""Indistinguishability relations and witness enumeration.

A witness universe bounds the "for all indistinguishable traces" of the
knowledge modality: interleavings of the source's thread projections, with
optional insertions of environment events.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from consistency_lens.config import DEFAULT_BUDGET, BudgetClock, SearchBudget
from consistency_lens.errors import PreconditionError
from consistency_lens.model.events import (
    AgentId,
    Event,
    Inv,
    Ret,
    Trace,
    check_index,
    is_unique,
    obs_view,
    project,
    threads,
)
from consistency_lens.spec.evc import forward_candidates


@dataclass(frozen=True)
class AgentGroup:
    """A group of threads, optionally joined by the observer.

    ``everyone`` stands for ``Threads``: all threads of the trace the group is
    resolved against.
    """

    threads: FrozenSet[AgentId] = frozenset()
    include_observer: bool = False
    everyone: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.threads, frozenset):
            object.__setattr__(self, "threads", frozenset(self.threads))
        if any(t.is_env for t in self.threads):
            raise PreconditionError("the environment cannot be a group member")
        if not self.threads and not self.include_observer and not self.everyone:
            raise PreconditionError("a group needs at least one thread or the observer")

    @classmethod
    def of(cls, *names: str, observer: bool = False) -> "AgentGroup":
        return cls(frozenset(AgentId.thread(n) for n in names), observer)

    @classmethod
    def all_threads(cls, include_observer: bool = False) -> "AgentGroup":
        return cls(frozenset(), include_observer, everyone=True)

    def resolve(self, *traces: Trace) -> FrozenSet[AgentId]:
        if not self.everyone:
            return self.threads
        found = set(self.threads)
        for E in traces:
            found.update(threads(E))
        return frozenset(found)

    def __str__(self) -> str:
        names = ["Threads"] if self.everyone else sorted(t.name for t in self.threads)
        if self.include_observer:
            names.append("obs")
        return "{" + ",".join(names) + "}"


def thread_indist(E: Trace, i: int, E2: Trace, i2: int, t: AgentId) -> bool:
    check_index(E, i)
    check_index(E2, i2)
    return project(E[:i], t) == project(E2[:i2], t)


def obs_leq(E: Trace, i: int, E2: Trace, i2: int) -> bool:
    """``⪯_obs``: a preorder on traces, not a partial order."""
    return obs_view(E, i) <= obs_view(E2, i2)


def group_indist(E: Trace, i: int, E2: Trace, i2: int, G: AgentGroup) -> bool:
    if not all(thread_indist(E, i, E2, i2, t) for t in G.resolve(E[:i], E2[:i2])):
        return False
    return not G.include_observer or obs_leq(E, i, E2, i2)


@dataclass(frozen=True)
class WitnessUniverse:
    source: Trace
    group: AgentGroup
    env_candidates: Tuple[Event, ...] = ()
    max_env_insertions: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.env_candidates, tuple):
            object.__setattr__(self, "env_candidates", tuple(self.env_candidates))
        if any(not e.agent.is_env for e in self.env_candidates):
            raise PreconditionError("env_candidates may only hold environment events")
        if self.max_env_insertions < 0:
            raise PreconditionError("max_env_insertions must be non-negative")


def universe_for(E: Trace, G: AgentGroup) -> WitnessUniverse:
    """The universe the logic quantifies over for ``D_G`` at ``(E, len(E))``.

    Environment candidates are the forwards of committed revisions; they
    depend only on the thread projections, so indistinguishable sources get
    the same universe.
    """
    candidates = forward_candidates(E)
    return WitnessUniverse(E, G, candidates, len(candidates))


def release_thresholds(source: Trace, order: Sequence[AgentId]) -> List[List[Tuple[int, ...]]]:
    """For each thread event, how many events of every thread must precede it.

    An invocation may only be emitted once every return that precedes it in
    the source has been emitted. Only meaningful for unique sources.
    """
    index = {t: k for k, t in enumerate(order)}
    consumed = [0] * len(order)
    last_ret = [0] * len(order)
    table: List[List[Tuple[int, ...]]] = [[] for _ in order]
    for e in source.events:
        if e.agent.is_env:
            continue
        k = index[e.agent]
        if isinstance(e.action, Inv):
            table[k].append(tuple(last_ret))
        else:
            table[k].append(tuple(0 for _ in order))
        consumed[k] += 1
        if isinstance(e.action, Ret):
            last_ret[k] = consumed[k]
    return table


class _Merge:
    def __init__(self, universe: WitnessUniverse, clock: BudgetClock) -> None:
        source = universe.source
        self.clock = clock
        self.source = source
        self.threads = threads(source)
        members = universe.group.resolve(source)
        self.required = [t in members for t in self.threads]
        self.projections: List[Tuple[Event, ...]] = [project(source, t).events for t in self.threads]
        self.observer = universe.group.include_observer
        pool = Counter(universe.env_candidates)
        self.env_pool: List[Tuple[Event, int]] = sorted(pool.items(), key=lambda item: str(item[0]))
        self.max_env = universe.max_env_insertions
        self.prune = self.observer and is_unique(source)
        self.post_filter = self.observer and not self.prune
        self.source_obs = obs_view(source) if self.observer else frozenset()
        self.release = release_thresholds(source, self.threads) if self.prune else []

    def walk(self) -> Iterator[Trace]:
        counts = [0] * len(self.threads)
        remaining = [n for _, n in self.env_pool]
        yield from self._walk(counts, remaining, [], 0)

    def _complete(self, counts: Sequence[int]) -> bool:
        return all(
            counts[k] == len(proj) for k, proj in enumerate(self.projections) if self.required[k]
        )

    def _truncated(self, counts: Sequence[int]) -> bool:
        return any(counts[k] < len(proj) for k, proj in enumerate(self.projections))

    def _walk(self, counts: List[int], remaining: List[int], emitted: List[Event], inserted: int) -> Iterator[Trace]:
        self.clock.tick()
        if self._complete(counts):
            witness = Trace(tuple(emitted))
            if not (self.post_filter or (self.observer and self._truncated(counts))) or self.source_obs <= obs_view(witness):
                yield witness
        for k, proj in enumerate(self.projections):
            if counts[k] == len(proj):
                continue
            if self.prune:
                need = self.release[k][counts[k]]
                if any(counts[u] < n for u, n in enumerate(need)):
                    continue
            counts[k] += 1
            emitted.append(proj[counts[k] - 1])
            yield from self._walk(counts, remaining, emitted, inserted)
            emitted.pop()
            counts[k] -= 1
        if inserted < self.max_env:
            for c, (event, _) in enumerate(self.env_pool):
                if remaining[c] == 0:
                    continue
                remaining[c] -= 1
                emitted.append(event)
                yield from self._walk(counts, remaining, emitted, inserted + 1)
                emitted.pop()
                remaining[c] += 1


def enumerate_witnesses(u: WitnessUniverse, budget: Optional[SearchBudget] = None) -> Iterator[Trace]:
    """Lazily yield every trace of the universe exactly once.

    Threads of the source outside the group contribute any prefix of their
    projection, so enlarging the group only removes witnesses.
    """
    merge = _Merge(u, (budget or DEFAULT_BUDGET).start())
    return merge.walk()


def witnesses_for(E: Trace, G: AgentGroup, budget: Optional[SearchBudget] = None) -> Iterator[Trace]:
    return enumerate_witnesses(universe_for(E, G), budget)
