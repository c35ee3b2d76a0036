"""Exhaustive and seeded random trace generators for the theorem suites."""
from __future__ import annotations

import random
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

from consistency_lens.config import DEFAULT_THREADS, EC_VARIABLES, REGISTER_VALUES
from consistency_lens.model.events import AgentId, Com, Event, Inv, Qu, Ret, Trace, Up, is_unique, ld, st
from consistency_lens.model.state import Assign


def interleavings(sequences: Sequence[Sequence[Event]]) -> Iterator[Tuple[Event, ...]]:
    """Every merge of ``sequences`` that keeps each one in order."""
    counts = [0] * len(sequences)
    total = sum(len(s) for s in sequences)
    out: List[Event] = []

    def walk() -> Iterator[Tuple[Event, ...]]:
        if len(out) == total:
            yield tuple(out)
            return
        for k, seq in enumerate(sequences):
            if counts[k] < len(seq):
                out.append(seq[counts[k]])
                counts[k] += 1
                yield from walk()
                counts[k] -= 1
                out.pop()

    return walk()


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _register_histories(t: AgentId, length: int, values: Sequence[int], split: bool) -> Iterator[Tuple[Event, ...]]:
    if not split:
        alphabet = [Event(t, ld(v)) for v in values] + [Event(t, st(v)) for v in values]
        yield from product(alphabet, repeat=length)
        return
    # sequential per-thread histories; a trailing invocation may stay pending
    def build(remaining: int) -> Iterator[Tuple[Event, ...]]:
        if remaining == 0:
            yield ()
            return
        invocations = [Event(t, Inv("ld"))] + [Event(t, Inv("st", v)) for v in values]
        for inv in invocations:
            if remaining == 1:
                yield (inv,)
                continue
            if inv.action.method == "ld":
                returns = [Event(t, Ret("ld", v)) for v in values]
            else:
                returns = [Event(t, Ret("st", True))]
            for ret in returns:
                for rest in build(remaining - 2):
                    yield (inv, ret) + rest

    yield from build(length)


def all_register_traces(
    max_events: int,
    threads: Sequence[str] = DEFAULT_THREADS,
    values: Sequence[int] = REGISTER_VALUES,
    split: bool = False,
    unique_only: bool = False,
) -> Iterator[Trace]:
    """All register traces with at most ``max_events`` events.

    Combined traces use ``ld``/``st`` calls; split traces use well-formed
    per-thread invocation/return histories.
    """
    agents = [AgentId.thread(name) for name in threads]
    for total in range(max_events + 1):
        for lengths in _compositions(total, len(agents)):
            per_thread = [list(_register_histories(a, n, values, split)) for a, n in zip(agents, lengths)]
            for choice in product(*per_thread):
                for events in interleavings(choice):
                    trace = Trace(events)
                    if not unique_only or is_unique(trace):
                        yield trace


def _ec_histories(t: AgentId, length: int, variables: Sequence[str], values: Sequence[int]) -> Iterator[Tuple[Event, ...]]:
    symbols: List[Optional[object]] = [None]
    symbols += [("up", x, v) for x in variables for v in values]
    symbols += [("qu", x, v) for x in variables for v in values]
    for word in product(symbols, repeat=length):
        rev = 0
        events: List[Event] = []
        for symbol in word:
            if symbol is None:
                events.append(Event(t, Com(rev)))
                rev += 1
            elif symbol[0] == "up":
                events.append(Event(t, Up(rev, Assign(symbol[1], symbol[2]))))
            else:
                events.append(Event(t, Qu(rev, symbol[1], symbol[2])))
        yield tuple(events)


def all_ec_traces(
    max_events: int,
    threads: Sequence[str] = DEFAULT_THREADS,
    variables: Sequence[str] = EC_VARIABLES,
    values: Sequence[int] = REGISTER_VALUES,
) -> Iterator[Trace]:
    """All EC traces without forwards, revision ids numbered from 0 per thread."""
    agents = [AgentId.thread(name) for name in threads]
    for total in range(max_events + 1):
        for lengths in _compositions(total, len(agents)):
            per_thread = [list(_ec_histories(a, n, variables, values)) for a, n in zip(agents, lengths)]
            for choice in product(*per_thread):
                for events in interleavings(choice):
                    yield Trace(events)


def random_register_trace(
    rng: random.Random,
    max_events: int,
    threads: Sequence[str] = DEFAULT_THREADS,
    values: Sequence[int] = REGISTER_VALUES,
    split: bool = False,
    unique: bool = False,
) -> Trace:
    """A random register trace; with ``unique`` no event repeats."""
    agents = [AgentId.thread(name) for name in threads]
    size = rng.randint(0, max_events)
    pending: dict = {}
    events: List[Event] = []
    seen = set()
    attempts = 0
    while len(events) < size and attempts < size * 20:
        attempts += 1
        t = agents[rng.randrange(len(agents))]
        v = values[rng.randrange(len(values))]
        if not split:
            event = Event(t, ld(v) if rng.random() < 0.5 else st(v))
        elif t in pending:
            method = pending[t]
            event = Event(t, Ret("ld", v) if method == "ld" else Ret("st", True))
        else:
            event = Event(t, Inv("ld") if rng.random() < 0.5 else Inv("st", v))
        if unique and event in seen:
            continue
        seen.add(event)
        events.append(event)
        if split:
            if isinstance(event.action, Inv):
                pending[t] = event.action.method
            else:
                pending.pop(t, None)
    return Trace(tuple(events))


def random_ec_trace(
    rng: random.Random,
    max_events: int,
    threads: Sequence[str] = DEFAULT_THREADS,
    variables: Sequence[str] = EC_VARIABLES,
    values: Sequence[int] = REGISTER_VALUES,
) -> Trace:
    agents = [AgentId.thread(name) for name in threads]
    size = rng.randint(0, max_events)
    revision = {t: 0 for t in agents}
    events: List[Event] = []
    for _ in range(size):
        t = agents[rng.randrange(len(agents))]
        rev = revision[t]
        roll = rng.random()
        x = variables[rng.randrange(len(variables))]
        v = values[rng.randrange(len(values))]
        if roll < 0.3:
            events.append(Event(t, Com(rev)))
            revision[t] += 1
        elif roll < 0.65:
            events.append(Event(t, Up(rev, Assign(x, v))))
        else:
            events.append(Event(t, Qu(rev, x, v)))
    return Trace(tuple(events))
