from pathlib import Path

import pytest

from consistency_lens.errors import TraceSyntaxError
from consistency_lens.io.trace_format import document_for, format_trace, parse_trace, parse_value
from consistency_lens.model.events import AgentId, Call, Event, Fwd, Inv, Ret, Trace, ld, st

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "traces"
T1 = AgentId.thread("t1")
T2 = AgentId.thread("t2")


def test_e1_document():
    doc = parse_trace((FIXTURES / "e1.trace").read_text())
    assert len(doc.trace) == 3
    assert doc.trace[2] == Event(T1, st(1))
    assert doc.threads == ("t1", "t2")
    assert doc.unique
    assert doc.spec == "register"


def test_empty_body():
    assert len(parse_trace("").trace) == 0
    assert len(parse_trace("#consistency-trace v1 threads=t1\n").trace) == 0


def test_fwd_from_a_thread_is_rejected():
    with pytest.raises(TraceSyntaxError, match="fwd requires env agent") as info:
        parse_trace("t1 up 0 x 1\nt1 fwd t1 t2 0\n")
    assert info.value.line == 2
    assert info.value.column == 4


def test_split_and_generic_actions():
    doc = parse_trace("t2 ld-inv\nt2 ld-ret 1\nt1 st-inv 1\nt1 st-ret true\nt1 call cas 1 false\n")
    assert doc.trace[0] == Event(T2, Inv("ld"))
    assert doc.trace[1] == Event(T2, Ret("ld", 1))
    assert doc.trace[3] == Event(T1, Ret("st", True))
    assert doc.trace[4] == Event(T1, Call("cas", 1, False))


def test_env_forward():
    doc = parse_trace("t1 com 0\nenv fwd t1 t2 0\n")
    assert doc.trace[1] == Event.env(Fwd(T1, T2, 0))


def test_undeclared_thread():
    with pytest.raises(TraceSyntaxError, match="not declared"):
        parse_trace("#consistency-trace v1 threads=t1\nt2 ld 0\n")


def test_duplicate_under_unique():
    with pytest.raises(TraceSyntaxError, match="duplicate") as info:
        parse_trace("#consistency-trace v1 unique=true\nt1 ld 0\nt1 ld 0\n")
    assert info.value.line == 3


def test_unique_is_inferred():
    assert parse_trace("t1 ld 0\nt2 ld 0\n").unique
    assert not parse_trace("t1 ld 0\nt1 ld 0\n").unique


@pytest.mark.parametrize(
    "text, message",
    [
        ("t1 jump 3\n", "unknown action kind"),
        ("t1 qu 0 x\n", "qu takes 3"),
        ("t1 ld maybe\n", "expected an integer"),
        ("env com 0\n", "must be performed by a thread"),
        ("#consistency-trace v2\n", "unsupported format version"),
        ("#consistency-trace v1 colour=red\n", "unknown header field"),
        ("t1 ld 0\n#consistency-trace v1\n", "header must precede"),
        ("t1\n", "expected"),
        ("t1 com -1\n", "revision must be non-negative"),
        ("t1 up -2 x 0\n", "revision must be non-negative"),
        ("t1 com 0\nenv fwd t1 t2 -1\n", "revision must be non-negative"),
        ("t1 qu one x 0\n", "expected a revision number"),
    ],
)
def test_syntax_errors(text, message):
    with pytest.raises(TraceSyntaxError, match=message):
        parse_trace(text)


def test_error_renders_line_and_column():
    assert str(TraceSyntaxError(3, 7, "boom")) == "3:7: boom"


def test_parse_value():
    assert parse_value("true") is True
    assert parse_value("-2") == -2


@pytest.mark.parametrize("name", [f"e{n}" for n in range(1, 9)])
def test_fixtures_print_back_unchanged(name):
    doc = parse_trace((FIXTURES / f"{name}.trace").read_text())
    again = parse_trace(format_trace(doc))
    assert again == doc
    assert format_trace(again) == format_trace(doc)


def test_document_for_generated_trace():
    trace = Trace((Event(T2, ld(0)), Event(T1, st(1))))
    doc = document_for(trace, "register")
    assert doc.threads == ("t2", "t1")
    assert format_trace(doc).splitlines() == [
        "#consistency-trace v1 threads=t2,t1 unique=true spec=register",
        "t2 ld 0",
        "t1 st 1",
    ]


def test_forward_endpoints_must_be_declared():
    header = "#consistency-trace v1 threads=t1,t2\n"
    with pytest.raises(TraceSyntaxError, match="fwd endpoint 't3'") as info:
        parse_trace(header + "t1 com 0\nenv fwd t1 t3 0\n")
    assert info.value.line == 3
    assert len(parse_trace(header + "t1 com 0\nenv fwd t1 t2 0\n").trace) == 2


def test_forward_to_an_idle_thread_prints_back():
    doc = parse_trace("t1 com 0\nenv fwd t1 t2 0\n")
    assert doc.threads == ("t1", "t2")
    assert parse_trace(format_trace(doc)) == doc
