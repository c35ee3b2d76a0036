"""Console helpers with ANSI colors.

Reports go to stdout, diagnostics to stderr. Colors are dropped when the
target stream is not a terminal.
"""
from __future__ import annotations

import sys
from typing import Iterable, TextIO

COLORS = {
    "green": "\033[92m",
    "yellow": "\033[93m",
    "red": "\033[91m",
    "reset": "\033[0m",
}


def _colorize(text: str, color: str, stream: TextIO) -> str:
    if not getattr(stream, "isatty", lambda: False)():
        return text
    return f"{COLORS.get(color, '')}{text}{COLORS['reset']}"


def info(message: str) -> None:
    print(message)


def success(message: str) -> None:
    print(_colorize(f"✅ {message}", "green", sys.stdout))


def warning(message: str) -> None:
    print(_colorize(f"⚠️ {message}", "yellow", sys.stderr), file=sys.stderr)


def error(message: str) -> None:
    print(_colorize(f"❌ {message}", "red", sys.stderr), file=sys.stderr)


def verdict(label: str, ok: bool) -> None:
    """One-line result, green when ``ok``."""
    mark = "✅" if ok else "❌"
    print(_colorize(f"{mark} {label}", "green" if ok else "red", sys.stdout))


def bullet_list(title: str, items: Iterable[str]) -> None:
    print(_colorize(title, "green", sys.stdout))
    for idx, item in enumerate(items, start=1):
        print(f"  {idx}. {item}")
