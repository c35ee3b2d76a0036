"""Temporal-epistemic formulas and their evaluation over finite traces.

Evaluation points run from 0 (the empty prefix) to ``len(E)``. ``Knows``
quantifies over the witness universe of the prefix, each witness judged at
its own final point.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from consistency_lens.config import (
    DEFAULT_SEMANTICS,
    SEMANTICS_ALIASES,
    SEMANTICS_CHOICES,
    SEMANTICS_LITERAL_U,
    SearchBudget,
)
from consistency_lens.errors import ConfigurationError, PreconditionError
from consistency_lens.knowledge.indist import AgentGroup, witnesses_for
from consistency_lens.model.events import (
    AgentId,
    Call,
    Com,
    Fwd,
    Inv,
    Qu,
    Ret,
    Trace,
    Up,
    check_index,
    prefix,
    threads,
)
from consistency_lens.model.state import Assign
from consistency_lens.spec import evc
from consistency_lens.spec.oracle import RegisterSpec, SpecOracle, spec_member


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Any

    def __str__(self) -> str:
        return str(self.value)


Term = Union[Var, Const]


class Formula:
    """Base class of the formula AST."""


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class Since(Formula):
    """``left S right``: ``right`` held at some point, ``left`` ever since."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: str
    body: Formula

    def __post_init__(self) -> None:
        if self.sort not in SORTS:
            raise ConfigurationError(f"unknown sort {self.sort!r}; choose from {list(SORTS)}")


@dataclass(frozen=True)
class Knows(Formula):
    group: AgentGroup
    body: Formula


SORTS = ("thread", "query", "value", "revision", "update", "action", "log")

TOP: Formula = Not(And(Atom("true"), Not(Atom("true"))))


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def Once(body: Formula) -> Formula:
    return Since(TOP, body)


def SoFar(body: Formula) -> Formula:
    return Not(Once(Not(body)))


def Eventually(body: Formula) -> Formula:
    return Until(TOP, body)


def Always(body: Formula) -> Formula:
    return Not(Eventually(Not(body)))


def WeakUntil(left: Formula, right: Formula) -> Formula:
    return Or(Until(left, right), Always(left))


def Exists(var: str, sort: str, body: Formula) -> Formula:
    return Not(Forall(var, sort, Not(body)))


def atom(pred: str, *args: Any) -> Atom:
    """Build an atom; strings starting with ``?`` become variables."""
    terms: List[Term] = []
    for a in args:
        if isinstance(a, (Var, Const)):
            terms.append(a)
        elif isinstance(a, str) and a.startswith("?"):
            terms.append(Var(a[1:]))
        else:
            terms.append(Const(a))
    return Atom(pred, tuple(terms))


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, (And, Since, Until)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Not, Knows)):
        return free_vars(f.body)
    if isinstance(f, Forall):
        return free_vars(f.body) - {f.var}
    raise PreconditionError(f"not a formula: {f!r}")


# -- sort domains -----------------------------------------------------------


def _value_key(value: Any) -> Tuple[str, Any]:
    return (type(value).__name__, value)


def _unique(values: Iterable[Any], key: Callable[[Any], Any] = lambda v: v) -> Tuple[Any, ...]:
    seen = set()
    out: List[Any] = []
    for v in values:
        k = key(v)
        if k not in seen:
            seen.add(k)
            out.append(v)
    return tuple(out)


def _canonical_logs(E: Trace) -> Tuple[evc.Log, ...]:
    ts = threads(E)
    knowledge = evc.Knowledge()
    logs = [evc.Log()]
    for j, e in enumerate(E.events, start=1):
        knowledge = knowledge.advance(j, e)
        logs.extend(evc.log_of(E, knowledge.of(t)) for t in ts)
    return _unique(logs)


@lru_cache(maxsize=4096)
def sort_domain(E: Trace, sort: str) -> Tuple[Any, ...]:
    """Finite domain of ``sort`` drawn from ``E``."""
    actions = [e.action for e in E.events]
    if sort == "thread":
        return threads(E)
    if sort == "query":
        names = [a.query for a in actions if isinstance(a, Qu)]
        names += [a.update.variable for a in actions if isinstance(a, Up)]
        return _unique(names)
    if sort == "value":
        values: List[Any] = [0]
        for a in actions:
            if isinstance(a, Qu):
                values.append(a.result)
            elif isinstance(a, Up):
                values.append(a.update.value)
            elif isinstance(a, (Inv, Ret)) and a.value is not None:
                values.append(a.value)
            elif isinstance(a, Call):
                values.extend(v for v in (a.arg, a.result) if v is not None)
        return _unique(values, _value_key)
    if sort == "revision":
        return _unique(a.rev for a in actions if isinstance(a, (Qu, Up, Com)))
    if sort == "update":
        return _unique(a.update for a in actions if isinstance(a, Up))
    if sort == "action":
        return _unique(a for a in actions if not isinstance(a, Fwd))
    if sort == "log":
        return _canonical_logs(E)
    raise ConfigurationError(f"unknown sort {sort!r}")


# -- atoms ------------------------------------------------------------------

AtomRule = Callable[[Trace, int, Tuple[Any, ...]], bool]
AtomBinding = Mapping[str, AtomRule]


def _agent(value: Any) -> AgentId:
    if isinstance(value, AgentId):
        return value
    return AgentId.thread(str(value))


def _update(value: Any) -> Assign:
    if isinstance(value, Assign):
        return value
    variable, _, number = str(value).partition(":=")
    return Assign(variable, int(number))


def _same(a: Any, b: Any) -> bool:
    return _value_key(a) == _value_key(b)


def _current(E: Trace, i: int):
    return E.at(i) if i >= 1 else None


def _query(E: Trace, i: int, args: Tuple[Any, ...]) -> bool:
    e = _current(E, i)
    if e is None or not isinstance(e.action, Qu) or e.agent != _agent(args[0]):
        return False
    a = e.action
    if a.query != args[1] or not _same(a.result, args[2]):
        return False
    return len(args) < 4 or a.rev == args[3]


def _update_atom(E: Trace, i: int, args: Tuple[Any, ...]) -> bool:
    e = _current(E, i)
    if e is None or not isinstance(e.action, Up) or e.agent != _agent(args[0]):
        return False
    return e.action.update == _update(args[1]) and (len(args) < 3 or e.action.rev == args[2])


def _commit(E: Trace, i: int, args: Tuple[Any, ...]) -> bool:
    e = _current(E, i)
    return e is not None and isinstance(e.action, Com) and e.agent == _agent(args[0]) and e.action.rev == args[1]


def _forward(E: Trace, i: int, args: Tuple[Any, ...]) -> bool:
    e = _current(E, i)
    if e is None or not isinstance(e.action, Fwd):
        return False
    a = e.action
    return a.sender == _agent(args[0]) and a.receiver == _agent(args[1]) and a.rev == args[2]


def _rev(E: Trace, i: int, args: Tuple[Any, ...]) -> bool:
    e = _current(E, i)
    return (
        e is not None
        and isinstance(e.action, (Qu, Up))
        and e.agent == _agent(args[0])
        and e.action.rev == args[1]
    )


def _log(value: Any) -> evc.Log:
    if isinstance(value, evc.Log):
        return value
    return evc.Log(tuple(value))


def default_atoms(spec: Optional[SpecOracle] = None) -> Dict[str, AtomRule]:
    spec = spec or RegisterSpec()
    return {
        "true": lambda E, i, args: True,
        "correct": lambda E, i, args: spec_member(spec, prefix(E, i)),
        "correct_evc": lambda E, i, args: evc.correct_evc(prefix(E, i)),
        "network_ok": lambda E, i, args: evc.network_ok(prefix(E, i)),
        "query": _query,
        "update": _update_atom,
        "commit": _commit,
        "forward": _forward,
        "rev": _rev,
        "in": lambda E, i, args: args[0] in _log(args[1]),
        "k_log": lambda E, i, args: args[1] in evc.k_log(E, i, _agent(args[0])),
        "consistent": lambda E, i, args: evc.consistent(E, i, _log(args[0])),
        "result": lambda E, i, args: evc.result(args[0], _log(args[1]), args[2]),
        "validLog": lambda E, i, args: evc.valid_log(E, i, _agent(args[1]), _log(args[0])),
    }


# -- evaluation -------------------------------------------------------------

Env = Dict[str, Any]


class Evaluator:
    """Evaluates closed formulas, caching knowledge sub-results."""

    def __init__(
        self,
        atoms: Optional[AtomBinding] = None,
        *,
        spec: Optional[SpecOracle] = None,
        semantics: str = DEFAULT_SEMANTICS,
        budget: Optional[SearchBudget] = None,
    ) -> None:
        if semantics not in SEMANTICS_CHOICES:
            raise ConfigurationError(f"unknown semantics {semantics!r}; choose from {SEMANTICS_CHOICES}")
        self.atoms: Dict[str, AtomRule] = default_atoms(spec)
        if atoms:
            self.atoms.update(atoms)
        self.semantics = SEMANTICS_ALIASES.get(semantics, semantics)
        self.budget = budget
        self._knows: Dict[Tuple[Any, ...], bool] = {}

    def eval(self, E: Trace, i: int, f: Formula) -> bool:
        check_index(E, i)
        unbound = free_vars(f)
        if unbound:
            raise PreconditionError(f"formula has free variables: {sorted(unbound)}")
        return self._eval(E, i, f, {})

    def _eval(self, E: Trace, i: int, f: Formula, env: Env) -> bool:
        if isinstance(f, Atom):
            rule = self.atoms.get(f.pred)
            if rule is None:
                raise ConfigurationError(f"unbound predicate {f.pred!r}")
            args = tuple(env[t.name] if isinstance(t, Var) else t.value for t in f.args)
            return rule(E, i, args)
        if isinstance(f, Not):
            return not self._eval(E, i, f.body, env)
        if isinstance(f, And):
            return self._eval(E, i, f.left, env) and self._eval(E, i, f.right, env)
        if isinstance(f, Since):
            for j in range(i, -1, -1):
                if self._eval(E, j, f.right, env):
                    return True
                if not self._eval(E, j, f.left, env):
                    return False
            return False
        if isinstance(f, Until):
            if self.semantics == SEMANTICS_LITERAL_U:
                # positions 1..i; the empty prefix is not a witness point
                points = range(1, i + 1)
            else:
                points = range(i, len(E) + 1)
            for j in points:
                if self._eval(E, j, f.right, env):
                    return True
                if not self._eval(E, j, f.left, env):
                    return False
            return False
        if isinstance(f, Forall):
            inner = dict(env)
            for value in sort_domain(E, f.sort):
                inner[f.var] = value
                if not self._eval(E, i, f.body, inner):
                    return False
            return True
        if isinstance(f, Knows):
            return self._knows_at(E, i, f, env)
        raise PreconditionError(f"not a formula: {f!r}")

    def _knows_at(self, E: Trace, i: int, f: Knows, env: Env) -> bool:
        bound = tuple((name, env[name]) for name in sorted(free_vars(f.body)))
        key = (E.events[:i], f, bound)
        cached = self._knows.get(key)
        if cached is not None:
            return cached
        outcome = all(self._eval(W, len(W), f.body, env) for W in witnesses_for(prefix(E, i), f.group, self.budget))
        self._knows[key] = outcome
        return outcome


def evaluate(
    E: Trace,
    i: int,
    f: Formula,
    atoms: Optional[AtomBinding] = None,
    semantics: str = DEFAULT_SEMANTICS,
    spec: Optional[SpecOracle] = None,
) -> bool:
    return Evaluator(atoms, spec=spec, semantics=semantics).eval(E, i, f)


AXIOMS = ("T", "4", "5")


def axiom_instance(axiom: str, G: AgentGroup, phi: Formula) -> Formula:
    known = Knows(G, phi)
    if axiom == "T":
        return Implies(known, phi)
    if axiom == "4":
        return Implies(known, Knows(G, known))
    if axiom == "5":
        return Implies(Not(known), Knows(G, Not(known)))
    raise ConfigurationError(f"unknown axiom {axiom!r}; choose from {list(AXIOMS)}")


def axiom_check(
    E: Trace,
    G: AgentGroup,
    phi: Formula,
    axiom: str,
    evaluator: Optional[Evaluator] = None,
) -> bool:
    evaluator = evaluator or Evaluator()
    return evaluator.eval(E, len(E), axiom_instance(axiom, G, phi))
