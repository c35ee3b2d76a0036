"""Database states, updates and queries used by eventually consistent traces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

Value = Union[int, bool, None]
Query = str
RevisionId = int


@dataclass(frozen=True, order=True)
class Assign:
    """Update ``variable := value``."""

    variable: str
    value: int

    def __post_init__(self) -> None:
        if not self.variable or not self.variable.isidentifier():
            raise ValueError(f"invalid variable name {self.variable!r}")

    def __str__(self) -> str:
        return f"{self.variable}:={self.value}"


Update = Assign


class State(Mapping[str, int]):
    """Total map from variables to integers, 0 where unset."""

    __slots__ = ("_items",)

    def __init__(self, values: Mapping[str, int] | None = None) -> None:
        items = {k: v for k, v in (values or {}).items() if v != 0}
        self._items: Tuple[Tuple[str, int], ...] = tuple(sorted(items.items()))

    def __getitem__(self, variable: str) -> int:
        for key, value in self._items:
            if key == variable:
                return value
        return 0

    def __iter__(self) -> Iterator[str]:
        return (key for key, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={v}" for k, v in self._items)
        return f"State({body})"

    def updated(self, variable: str, value: int) -> "State":
        values: Dict[str, int] = dict(self._items)
        values[variable] = value
        return State(values)


S0 = State()


def interpret_update(update: Update, state: State) -> State:
    """``u#``."""
    return state.updated(update.variable, update.value)


def interpret_query(query: Query, state: State) -> Value:
    """``q#``."""
    return state[query]


def fold_updates(updates: Iterable[Update], state: State = S0) -> State:
    for update in updates:
        state = interpret_update(update, state)
    return state
