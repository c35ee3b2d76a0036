"""Line-oriented trace documents.

A document is an optional header followed by one event per line::

    #consistency-trace v1 threads=t1,t2 unique=true spec=register
    t2 ld-inv
    t2 ld-ret 1
    t1 st 1
    t1 up 0 x 0
    env fwd t1 t2 0

``ld v`` and ``st v`` are combined calls. Other lines starting with ``#`` are
comments; blank lines are skipped.
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

from consistency_lens.config import TRACE_FORMAT_VERSION, TRACE_HEADER_MAGIC
from consistency_lens.errors import PreconditionError, TraceSyntaxError
from consistency_lens.model.events import (
    ENV_NAME,
    AgentId,
    Call,
    Com,
    Event,
    Fwd,
    Inv,
    Qu,
    Ret,
    Trace,
    Up,
)
from consistency_lens.model.state import Assign, Value

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class TraceDocument:
    trace: Trace
    threads: Tuple[str, ...] = ()
    unique: bool = False
    spec: Optional[str] = None
    version: str = TRACE_FORMAT_VERSION


def _tokens(line: str) -> List[Tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]


def parse_value(text: str) -> Value:
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer or true/false, got {text!r}") from None


def format_value(value: Value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _optional(text: str) -> Value:
    return None if text == "-" else parse_value(text)


def _parse_header(lineno: int, line: str) -> Tuple[str, Tuple[str, ...], Optional[bool], Optional[str]]:
    tokens = _tokens(line)
    if len(tokens) < 2:
        raise TraceSyntaxError(lineno, 1, "header needs a format version")
    col, version = tokens[1]
    if version != TRACE_FORMAT_VERSION:
        raise TraceSyntaxError(lineno, col, f"unsupported format version {version!r}")
    declared: Tuple[str, ...] = ()
    unique: Optional[bool] = None
    spec: Optional[str] = None
    for col, token in tokens[2:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise TraceSyntaxError(lineno, col, f"expected key=value, got {token!r}")
        if key == "threads":
            declared = tuple(name for name in value.split(",") if name)
        elif key == "unique":
            if value not in ("true", "false"):
                raise TraceSyntaxError(lineno, col, "unique must be true or false")
            unique = value == "true"
        elif key == "spec":
            spec = value
        else:
            raise TraceSyntaxError(lineno, col, f"unknown header field {key!r}")
    return version, declared, unique, spec


def _revision(text: str) -> int:
    try:
        rev = int(text)
    except ValueError:
        raise ValueError(f"expected a revision number, got {text!r}") from None
    if rev < 0:
        raise ValueError(f"revision must be non-negative, got {rev}")
    return rev


def _parse_thread_action(kind: str, fields: List[str]):
    def arity(n: int) -> None:
        if len(fields) != n:
            raise ValueError(f"{kind} takes {n} field(s), got {len(fields)}")

    if kind.endswith("-inv") or kind.endswith("-ret"):
        method = kind[:-4]
        if not method.isidentifier():
            raise ValueError(f"invalid method name {method!r}")
        if len(fields) > 1:
            raise ValueError(f"{kind} takes at most one value")
        value = parse_value(fields[0]) if fields else None
        return Inv(method, value) if kind.endswith("-inv") else Ret(method, value)
    if kind == "ld":
        arity(1)
        return Call("ld", None, parse_value(fields[0]))
    if kind == "st":
        arity(1)
        return Call("st", parse_value(fields[0]), True)
    if kind == "call":
        arity(3)
        if not fields[0].isidentifier():
            raise ValueError(f"invalid method name {fields[0]!r}")
        return Call(fields[0], _optional(fields[1]), _optional(fields[2]))
    if kind == "qu":
        arity(3)
        return Qu(_revision(fields[0]), fields[1], parse_value(fields[2]))
    if kind == "up":
        arity(3)
        return Up(_revision(fields[0]), Assign(fields[1], int(fields[2])))
    if kind == "com":
        arity(1)
        return Com(_revision(fields[0]))
    if kind == "fwd":
        raise ValueError("fwd requires env agent")
    raise ValueError(f"unknown action kind {kind!r}")


def _parse_event(lineno: int, line: str) -> Event:
    tokens = _tokens(line)
    if len(tokens) < 2:
        raise TraceSyntaxError(lineno, 1, "expected '<agent> <kind> [fields...]'")
    (agent_col, agent), (kind_col, kind) = tokens[0], tokens[1]
    fields = [text for _, text in tokens[2:]]
    try:
        if agent == ENV_NAME:
            if kind != "fwd":
                raise ValueError(f"{kind} actions must be performed by a thread")
            if len(fields) != 3:
                raise ValueError("fwd takes sender, receiver and revision")
            return Event.env(Fwd(AgentId.thread(fields[0]), AgentId.thread(fields[1]), _revision(fields[2])))
        try:
            who = AgentId.thread(agent)
        except PreconditionError as exc:
            raise TraceSyntaxError(lineno, agent_col, str(exc)) from None
        return Event(who, _parse_thread_action(kind, fields))
    except (ValueError, PreconditionError) as exc:
        if isinstance(exc, TraceSyntaxError):
            raise
        raise TraceSyntaxError(lineno, kind_col, str(exc)) from None


def parse_trace(text: str) -> TraceDocument:
    """Parse a document, validating the header flags against the body."""
    version = TRACE_FORMAT_VERSION
    declared: Tuple[str, ...] = ()
    unique: Optional[bool] = None
    spec: Optional[str] = None
    events: List[Event] = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(TRACE_HEADER_MAGIC):
            if events:
                raise TraceSyntaxError(lineno, 1, "header must precede the events")
            version, declared, unique, spec = _parse_header(lineno, line)
            continue
        if line.startswith("#"):
            continue
        event = _parse_event(lineno, raw)
        if declared and isinstance(event.action, Fwd):
            for end in (event.action.sender, event.action.receiver):
                if end.name not in declared:
                    raise TraceSyntaxError(lineno, 1, f"fwd endpoint {end.name!r} is not declared in the header")
        if declared and not event.agent.is_env and event.agent.name not in declared:
            raise TraceSyntaxError(lineno, 1, f"thread {event.agent.name!r} is not declared in the header")
        if unique and event in seen:
            raise TraceSyntaxError(lineno, 1, f"duplicate event {event} (first on line {seen[event]}) under unique=true")
        seen.setdefault(event, lineno)
        events.append(event)
    trace = Trace(tuple(events))
    if unique is None:
        unique = len(seen) == len(events)
    return TraceDocument(trace, declared or _named_threads(trace), unique, spec, version)


def format_event(event: Event) -> str:
    a = event.action
    who = event.agent.name
    if isinstance(a, Fwd):
        return f"{who} fwd {a.sender} {a.receiver} {a.rev}"
    if isinstance(a, (Inv, Ret)):
        text = f"{who} {a.method}-{a.kind}"
        return text if a.value is None else f"{text} {format_value(a.value)}"
    if isinstance(a, Call):
        if a.method == "ld" and a.arg is None and a.result is not None:
            return f"{who} ld {format_value(a.result)}"
        if a.method == "st" and a.arg is not None and a.result is True:
            return f"{who} st {format_value(a.arg)}"
        return f"{who} call {a.method} {format_value(a.arg)} {format_value(a.result)}"
    if isinstance(a, Qu):
        return f"{who} qu {a.rev} {a.query} {format_value(a.result)}"
    if isinstance(a, Up):
        return f"{who} up {a.rev} {a.update.variable} {a.update.value}"
    return f"{who} com {a.rev}"


def format_header(doc: TraceDocument) -> str:
    parts = [TRACE_HEADER_MAGIC, doc.version]
    if doc.threads:
        parts.append("threads=" + ",".join(doc.threads))
    parts.append("unique=" + ("true" if doc.unique else "false"))
    if doc.spec:
        parts.append(f"spec={doc.spec}")
    return " ".join(parts)


def format_trace(doc: Union[TraceDocument, Trace]) -> str:
    if isinstance(doc, Trace):
        doc = document_for(doc)
    lines = [format_header(doc)] + [format_event(e) for e in doc.trace]
    return "\n".join(lines) + "\n"


def _named_threads(trace: Trace) -> Tuple[str, ...]:
    names: List[str] = []
    for e in trace.events:
        agents = (e.action.sender, e.action.receiver) if isinstance(e.action, Fwd) else (e.agent,)
        for agent in agents:
            if not agent.is_env and agent.name not in names:
                names.append(agent.name)
    return tuple(names)


def document_for(trace: Trace, spec: Optional[str] = None) -> TraceDocument:
    """A document declaring every thread that acts or is named by a forward."""
    return TraceDocument(
        trace,
        _named_threads(trace),
        len(set(trace.events)) == len(trace),
        spec,
    )


def read_document(path: str) -> TraceDocument:
    """Read a document from ``path``, or from standard input for ``-``."""
    if path == "-":
        return parse_trace(sys.stdin.read())
    return parse_trace(Path(path).read_text())
