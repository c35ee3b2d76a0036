"""S-expression syntax for formulas.

Examples::

    (not (knows all (not correct)))
    (knows all+obs correct)
    (knows (t1 t2 obs) (once (commit t1 0)))
    (forall t:thread (forall q:query (forall r:value (sofar (implies (query ?t ?q ?r) (exists L:log (and (validLog ?L ?t) (result ?q ?L ?r))))))))

Bare names are nullary atoms; ``top`` is the true formula. Inside an atom,
``?x`` is a variable, integers and ``true``/``false`` are values, ``x:=1`` is
an update and any other word is a constant (thread or query name).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Union

from consistency_lens.errors import TraceSyntaxError
from consistency_lens.knowledge.indist import AgentGroup
from consistency_lens.knowledge.logic import (
    SORTS,
    TOP,
    Always,
    And,
    Atom,
    Const,
    Eventually,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Knows,
    Not,
    Once,
    Or,
    Since,
    SoFar,
    Term,
    Until,
    Var,
    WeakUntil,
)
from consistency_lens.model.state import Assign

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    column: int


Node = Union[_Tok, List["Node"]]


def _tokenize(text: str) -> List[_Tok]:
    tokens: List[_Tok] = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        for m in _TOKEN.finditer(line):
            tokens.append(_Tok(m.group(), lineno, m.start() + 1))
    return tokens


def _read(tokens: List[_Tok]) -> Node:
    stack: List[List[Node]] = [[]]
    opened: List[_Tok] = []
    for tok in tokens:
        if tok.text == "(":
            stack.append([])
            opened.append(tok)
        elif tok.text == ")":
            if len(stack) == 1:
                raise TraceSyntaxError(tok.line, tok.column, "unbalanced ')'")
            done = stack.pop()
            opened.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if opened:
        tok = opened[-1]
        raise TraceSyntaxError(tok.line, tok.column, "unclosed '('")
    top = stack[0]
    if len(top) != 1:
        where = top[1] if len(top) > 1 else None
        line, col = _position(where) if where is not None else (1, 1)
        raise TraceSyntaxError(line, col, "expected exactly one formula")
    return top[0]


def _position(node: Node) -> tuple:
    while isinstance(node, list):
        if not node:
            return (1, 1)
        node = node[0]
    return (node.line, node.column)


def _fail(node: Node, message: str) -> TraceSyntaxError:
    line, col = _position(node)
    return TraceSyntaxError(line, col, message)


def _term(node: Node) -> Term:
    if isinstance(node, list):
        raise _fail(node, "atom arguments cannot be nested")
    text = node.text
    if text.startswith("?"):
        return Var(text[1:])
    if text in ("true", "false"):
        return Const(text == "true")
    if re.fullmatch(r"-?\d+", text):
        return Const(int(text))
    if ":=" in text:
        variable, _, value = text.partition(":=")
        try:
            return Const(Assign(variable, int(value)))
        except ValueError as exc:
            raise _fail(node, str(exc)) from None
    return Const(text)


def _group(node: Node) -> AgentGroup:
    if isinstance(node, _Tok):
        if node.text == "all":
            return AgentGroup.all_threads()
        if node.text == "all+obs":
            return AgentGroup.all_threads(include_observer=True)
        if node.text == "obs":
            return AgentGroup(frozenset(), include_observer=True)
        return AgentGroup.of(node.text)
    names = [n.text if isinstance(n, _Tok) else "" for n in node]
    if "" in names:
        raise _fail(node, "group members are plain names")
    observer = "obs" in names
    members = [n for n in names if n != "obs"]
    if "all" in members:
        return AgentGroup.all_threads(include_observer=observer)
    return AgentGroup.of(*members, observer=observer)


def _binder(node: Node) -> tuple:
    if isinstance(node, list) or ":" not in node.text:
        raise _fail(node, "expected a binder 'name:sort'")
    name, _, sort = node.text.partition(":")
    if sort not in SORTS:
        raise _fail(node, f"unknown sort {sort!r}; choose from {list(SORTS)}")
    return name, sort


_UNARY: Dict[str, Callable[[Formula], Formula]] = {
    "not": Not,
    "once": Once,
    "sofar": SoFar,
    "eventually": Eventually,
    "always": Always,
}
_BINARY: Dict[str, Callable[[Formula, Formula], Formula]] = {
    "implies": Implies,
    "iff": Iff,
    "since": Since,
    "until": Until,
    "weakuntil": WeakUntil,
}


def _formula(node: Node) -> Formula:
    if isinstance(node, _Tok):
        if node.text == "top":
            return TOP
        return Atom(node.text)
    if not node or isinstance(node[0], list):
        raise _fail(node, "expected an operator or predicate name")
    head, args = node[0].text, node[1:]

    def expect(n: int) -> None:
        if len(args) != n:
            raise _fail(node, f"{head} takes {n} argument(s), got {len(args)}")

    if head in _UNARY:
        expect(1)
        return _UNARY[head](_formula(args[0]))
    if head in _BINARY:
        expect(2)
        return _BINARY[head](_formula(args[0]), _formula(args[1]))
    if head in ("and", "or"):
        if len(args) < 2:
            raise _fail(node, f"{head} takes at least 2 arguments")
        combine = And if head == "and" else Or
        result = _formula(args[0])
        for arg in args[1:]:
            result = combine(result, _formula(arg))
        return result
    if head in ("forall", "exists"):
        expect(2)
        name, sort = _binder(args[0])
        body = _formula(args[1])
        return Forall(name, sort, body) if head == "forall" else Exists(name, sort, body)
    if head == "knows":
        expect(2)
        return Knows(_group(args[0]), _formula(args[1]))
    return Atom(head, tuple(_term(a) for a in args))


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    if not tokens:
        raise TraceSyntaxError(1, 1, "empty formula")
    return _formula(_read(tokens))
