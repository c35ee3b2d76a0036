"""Library of the consistency formulas used by the checkers and the harness."""
from __future__ import annotations

from consistency_lens.knowledge.indist import AgentGroup
from consistency_lens.knowledge.logic import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Implies,
    Knows,
    Not,
    SoFar,
    atom,
    axiom_instance,
)

__all__ = [
    "axiom_instance",
    "correct",
    "correct_evc",
    "correct_evc_formula",
    "knows_threads",
    "knows_threads_obs",
    "lin",
    "seq_cons",
]


def correct() -> Formula:
    return Atom("correct")


def correct_evc() -> Formula:
    return Atom("correct_evc")


def knows_threads(phi: Formula) -> Formula:
    return Knows(AgentGroup.all_threads(), phi)


def knows_threads_obs(phi: Formula) -> Formula:
    return Knows(AgentGroup.all_threads(include_observer=True), phi)


def seq_cons() -> Formula:
    """The threads do not jointly know the trace is incorrect."""
    return Not(knows_threads(Not(correct())))


def lin() -> Formula:
    return Not(knows_threads_obs(Not(correct())))


def correct_evc_formula() -> Formula:
    """Eventual-consistency correctness written in the logic.

    Every query is backed by some log that is valid for the querying thread
    and yields the returned value; the network rules are an atom.
    """
    backed = Exists(
        "L",
        "log",
        And(atom("validLog", "?L", "?t"), atom("result", "?q", "?L", "?r")),
    )
    queries = Forall(
        "t",
        "thread",
        Forall("q", "query", Forall("r", "value", SoFar(Implies(atom("query", "?t", "?q", "?r"), backed)))),
    )
    return And(queries, Atom("network_ok"))
