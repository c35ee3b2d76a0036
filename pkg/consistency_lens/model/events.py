"""Events, actions and traces.

Positions are 1-based: ``trace.at(1)`` is the first event and ``prefix(E, 0)``
is the empty trace. ``pos`` returns :data:`OMEGA` for events that do not occur.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import (
    ClassVar,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
    overload,
)

from consistency_lens.errors import PreconditionError
from consistency_lens.model.state import Query, RevisionId, Update, Value

T = TypeVar("T")

THREAD = "thread"
ENVIRONMENT = "environment"
ENV_NAME = "env"


@dataclass(frozen=True, order=True)
class AgentId:
    kind: str
    name: str

    def __post_init__(self) -> None:
        if self.kind == ENVIRONMENT:
            if self.name != ENV_NAME:
                raise PreconditionError("the environment agent is always named 'env'")
            return
        if self.kind != THREAD:
            raise PreconditionError(f"unknown agent kind {self.kind!r}")
        if not self.name or not self.name.isidentifier() or self.name == ENV_NAME:
            raise PreconditionError(f"invalid thread name {self.name!r}")

    @classmethod
    def thread(cls, name: str) -> "AgentId":
        return cls(THREAD, name)

    @property
    def is_env(self) -> bool:
        return self.kind == ENVIRONMENT

    def __str__(self) -> str:
        return self.name


ENV = AgentId(ENVIRONMENT, ENV_NAME)


def _fmt(value: Value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class Inv:
    method: str
    value: Value = None
    kind: ClassVar[str] = "inv"

    def __str__(self) -> str:
        return f"inv {self.method}({_fmt(self.value)})"


@dataclass(frozen=True)
class Ret:
    method: str
    value: Value = None
    kind: ClassVar[str] = "ret"

    def __str__(self) -> str:
        return f"ret {self.method}({_fmt(self.value)})"


@dataclass(frozen=True)
class Call:
    """A method call whose invocation and return are one atomic event."""

    method: str
    arg: Value
    result: Value
    kind: ClassVar[str] = "call"

    def __str__(self) -> str:
        if self.arg is None:
            return f"{self.method}({_fmt(self.result)})"
        if self.result is True:
            return f"{self.method}({_fmt(self.arg)})"
        return f"{self.method}({_fmt(self.arg)})->{_fmt(self.result)}"


@dataclass(frozen=True)
class Qu:
    rev: RevisionId
    query: Query
    result: Value
    kind: ClassVar[str] = "qu"

    def __str__(self) -> str:
        return f"qu({self.rev},{self.query},{_fmt(self.result)})"


@dataclass(frozen=True)
class Up:
    rev: RevisionId
    update: Update
    kind: ClassVar[str] = "up"

    def __str__(self) -> str:
        return f"up({self.rev},{self.update})"


@dataclass(frozen=True)
class Com:
    rev: RevisionId
    kind: ClassVar[str] = "com"

    def __str__(self) -> str:
        return f"com({self.rev})"


@dataclass(frozen=True)
class Fwd:
    sender: AgentId
    receiver: AgentId
    rev: RevisionId
    kind: ClassVar[str] = "fwd"

    def __post_init__(self) -> None:
        if self.sender.is_env or self.receiver.is_env:
            raise PreconditionError("fwd endpoints must be threads")

    def __str__(self) -> str:
        return f"fwd({self.sender},{self.receiver},{self.rev})"


Action = Union[Inv, Ret, Call, Qu, Up, Com, Fwd]
GENERIC_KINDS = frozenset({"inv", "ret", "call"})
EC_KINDS = frozenset({"qu", "up", "com", "fwd"})


def revision_of(action: Action) -> Optional[RevisionId]:
    """Revision id of a qu/up/com action, ``None`` for everything else."""
    if isinstance(action, (Qu, Up, Com)):
        return action.rev
    return None


def ld(value: Value) -> Call:
    return Call("ld", None, value)


def st(value: Value) -> Call:
    return Call("st", value, True)


@dataclass(frozen=True)
class Event:
    agent: AgentId
    action: Action

    def __post_init__(self) -> None:
        if isinstance(self.action, Fwd):
            if not self.agent.is_env:
                raise PreconditionError("fwd requires env agent")
        elif self.agent.is_env:
            raise PreconditionError(f"{self.action.kind} actions must be performed by a thread")

    @classmethod
    def of(cls, thread: str, action: Action) -> "Event":
        return cls(AgentId.thread(thread), action)

    @classmethod
    def env(cls, action: Fwd) -> "Event":
        return cls(ENV, action)

    @property
    def kind(self) -> str:
        return self.action.kind

    def __str__(self) -> str:
        return f"({self.agent}, {self.action})"


class _Omega:
    """Position of an event that does not occur."""

    _instance: ClassVar[Optional["_Omega"]] = None

    def __new__(cls) -> "_Omega":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMEGA"

    def __bool__(self) -> bool:
        return False


OMEGA = _Omega()


@dataclass(frozen=True)
class Trace:
    events: Tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.events, tuple):
            object.__setattr__(self, "events", tuple(self.events))

    @classmethod
    def of(cls, events: Iterable[Event]) -> "Trace":
        return cls(tuple(events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @overload
    def __getitem__(self, index: int) -> Event: ...

    @overload
    def __getitem__(self, index: slice) -> "Trace": ...

    def __getitem__(self, index):  # 0-based, like any Python sequence
        if isinstance(index, slice):
            return Trace(self.events[index])
        return self.events[index]

    def at(self, i: int) -> Event:
        """``E@i`` with 1-based ``i``."""
        if not 1 <= i <= len(self.events):
            raise PreconditionError(f"position {i} outside 1..{len(self.events)}")
        return self.events[i - 1]

    def __add__(self, other: "Trace") -> "Trace":
        return Trace(self.events + other.events)

    def __str__(self) -> str:
        return " ".join(str(e) for e in self.events) or "ε"


EMPTY = Trace()


def check_index(E: Trace, i: int) -> None:
    if not 0 <= i <= len(E):
        raise PreconditionError(f"index {i} outside 0..{len(E)}")


def project(E: Trace, t: AgentId) -> Trace:
    """``E↓t``; environment events are never included."""
    if t.is_env:
        return EMPTY
    return Trace(tuple(e for e in E.events if e.agent == t))


def prefix(E: Trace, i: int) -> Trace:
    """``E↾i``: the first ``i`` events."""
    check_index(E, i)
    return Trace(E.events[:i])


def pos(e: Event, E: Trace) -> Union[int, _Omega]:
    for j, candidate in enumerate(E.events, start=1):
        if candidate == e:
            return j
    return OMEGA


def obs_view(E: Trace, i: Optional[int] = None) -> FrozenSet[Tuple[Event, Event]]:
    """Pairs ``(r, in)`` with ``pos(r,E) < pos(in,E) <= i``."""
    if i is None:
        i = len(E)
    check_index(E, i)
    first_ret: dict = {}
    first_inv: dict = {}
    for j, e in enumerate(E.events, start=1):
        if isinstance(e.action, Ret):
            first_ret.setdefault(e, j)
        elif isinstance(e.action, Inv):
            first_inv.setdefault(e, j)
    return frozenset(
        (r, inv)
        for r, rj in first_ret.items()
        for inv, ij in first_inv.items()
        if rj < ij <= i
    )


def act_seq(E: Trace) -> Tuple[Action, ...]:
    return tuple(e.action for e in E.events)


def is_subsequence(a: Sequence[T], b: Sequence[T]) -> bool:
    """True iff ``a`` embeds order-preservingly in ``b``."""
    remaining = iter(b)
    return all(any(x == y for y in remaining) for x in a)


def threads(E: Trace) -> Tuple[AgentId, ...]:
    """Thread agents of ``E`` in order of first appearance."""
    seen: List[AgentId] = []
    for e in E.events:
        if not e.agent.is_env and e.agent not in seen:
            seen.append(e.agent)
    return tuple(seen)


def event_set(E: Trace) -> FrozenSet[Event]:
    return frozenset(E.events)


def is_unique(E: Trace) -> bool:
    return len(set(E.events)) == len(E.events)


def duplicate_events(E: Trace) -> List[Event]:
    return [e for e, n in Counter(E.events).items() if n > 1]


def env_events(E: Trace) -> Tuple[Event, ...]:
    return tuple(e for e in E.events if e.agent.is_env)


def strip_env(E: Trace) -> Trace:
    return Trace(tuple(e for e in E.events if not e.agent.is_env))


def split_calls(E: Trace) -> Trace:
    """Expand each combined call into an adjacent invocation/return pair."""
    events: List[Event] = []
    for e in E.events:
        if isinstance(e.action, Call):
            events.append(Event(e.agent, Inv(e.action.method, e.action.arg)))
            events.append(Event(e.agent, Ret(e.action.method, e.action.result)))
        else:
            events.append(e)
    return Trace(tuple(events))


def has_calls(E: Trace) -> bool:
    return any(isinstance(e.action, Call) for e in E.events)
