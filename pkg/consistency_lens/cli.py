"""Command line entrypoint for consistency-lens."""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Iterable, List, NoReturn, Optional, Sequence

from consistency_lens.checkers.detect import detect_lin, detect_sc
from consistency_lens.checkers.eventual import check_ec, validate_ec_witness
from consistency_lens.checkers.search import check_lin, check_sc, validate_witness
from consistency_lens.checkers.verdict import Verdict
from consistency_lens.config import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_SEMANTICS,
    DEFAULT_SPEC,
    DEFAULT_THREADS,
    EC_THEOREM_MAX_EVENTS,
    EXIT_CONSISTENT,
    EXIT_INCONSISTENT,
    EXIT_UNKNOWN,
    EXIT_USAGE,
    GENERATED_TRACE_COUNT,
    SEMANTICS_CHOICES,
    SPEC_CHOICES,
    SearchBudget,
)
from consistency_lens.errors import BudgetExceeded, ConfigurationError, PreconditionError, TraceSyntaxError
from consistency_lens.harness.generate import (
    all_ec_traces,
    all_register_traces,
    random_ec_trace,
    random_register_trace,
)
from consistency_lens.harness.theorems import SUITES, run_suites
from consistency_lens.io.formula_syntax import parse_formula
from consistency_lens.io.trace_format import TraceDocument, document_for, format_trace, read_document
from consistency_lens.knowledge.logic import Evaluator
from consistency_lens.model.events import Trace, split_calls
from consistency_lens.spec.evc import OrderCertificate
from consistency_lens.spec.oracle import SpecOracle, spec_by_name
from consistency_lens.utils import log

EC_METHODS = ("axiomatic", "epistemic", "both")
CORPORA = ("register", "register-split", "ec")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        log.error(f"{self.prog}: {message}")
        raise SystemExit(EXIT_USAGE)


def _add_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET.nodes, help="Search node limit")
    parser.add_argument("--budget-ms", type=int, default=None, help="Wall-clock limit in milliseconds")


def _add_jobs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1, serial)")


def _add_spec(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", choices=SPEC_CHOICES, help=f"Sequential specification (default: header or {DEFAULT_SPEC})")


def _parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = _Parser(prog="consistency-lens", description="Consistency checking through the lens of knowledge")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, summary in (("check-sc", "Sequential consistency"), ("check-lin", "Linearizability")):
        cmd = commands.add_parser(name, help=summary)
        cmd.add_argument("trace", help="Trace document, or - for stdin")
        _add_spec(cmd)
        _add_budget(cmd)
        _add_jobs(cmd)
        cmd.add_argument("--emit", help="Write the witness document to this path")
        cmd.add_argument("--validate-only", metavar="WITNESS", help="Only re-check WITNESS against the trace")

    ec = commands.add_parser("check-ec", help="Eventual consistency")
    ec.add_argument("trace", help="Trace document, or - for stdin")
    ec.add_argument("--method", choices=EC_METHODS, default="both")
    _add_budget(ec)
    _add_jobs(ec)
    ec.add_argument("--emit", help="Write the witness document to this path")
    ec.add_argument("--validate-only", metavar="WITNESS", help="Only re-check WITNESS against the trace")

    ev = commands.add_parser("eval", help="Evaluate a formula at the end of a trace")
    ev.add_argument("formula", help="Formula in s-expression syntax")
    ev.add_argument("trace", help="Trace document, or - for stdin")
    ev.add_argument("--at", type=int, help="Evaluation point (default: trace length)")
    ev.add_argument("--semantics", choices=SEMANTICS_CHOICES, default=DEFAULT_SEMANTICS)
    _add_spec(ev)
    _add_budget(ev)

    det = commands.add_parser("detect", help="Whether the threads know a trace is (in)consistent")
    det.add_argument("trace", help="Trace document, or - for stdin")
    det.add_argument("--property", choices=("sc", "lin"), default="sc")
    _add_spec(det)

    thm = commands.add_parser("theorems", help="Run the oracle-equivalence suites")
    thm.add_argument("--suite", action="append", choices=SUITES, help="Suite to run (repeatable; default: all)")
    thm.add_argument("--max-events", type=int, help="Exhaustive size bound")
    thm.add_argument("--count", type=int, default=GENERATED_TRACE_COUNT, help="Generated traces per knowledge suite")
    thm.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_jobs(thm)
    thm.add_argument("--spec", choices=SPEC_CHOICES, default=DEFAULT_SPEC)

    gen = commands.add_parser("generate", help="Emit a random or exhaustive trace corpus")
    gen.add_argument("corpus", choices=CORPORA)
    gen.add_argument("--max-events", type=int, default=EC_THEOREM_MAX_EVENTS)
    gen.add_argument("--count", type=int, default=10, help="Random traces to draw")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--exhaustive", action="store_true", help="Every trace up to --max-events")
    gen.add_argument("--threads", default=",".join(DEFAULT_THREADS), help="Comma separated thread names")
    gen.add_argument("--out", help="Directory for one file per trace (default: stdout)")

    show = commands.add_parser("print", help="Normalize a trace document")
    show.add_argument("trace", help="Trace document, or - for stdin")
    show.add_argument("--split", action="store_true", help="Expand combined calls into inv/ret pairs")

    return parser.parse_args(argv)


def _budget(args: argparse.Namespace) -> SearchBudget:
    return SearchBudget(nodes=args.budget_nodes, millis=args.budget_ms)


def _spec(args: argparse.Namespace, doc: TraceDocument) -> SpecOracle:
    return spec_by_name(args.spec or doc.spec or DEFAULT_SPEC)


def _format_certificate(cert: OrderCertificate) -> List[str]:
    visibility = " ".join(f"{a}<{b}" for a, b in sorted(cert.visibility)) or "-"
    return [
        "arbitration: " + " ".join(str(p) for p in cert.arbitration),
        "visibility: " + visibility,
    ]


def _report(label: str, verdict: Verdict, emit: Optional[str], spec_name: Optional[str] = None) -> int:
    stats = verdict.stats
    log.verdict(f"{label}: {'consistent' if verdict.consistent else 'inconsistent'}", verdict.consistent)
    log.info(f"  explored {stats.nodes} nodes in {stats.elapsed_ms} ms")
    if verdict.witness is not None:
        text = format_trace(document_for(verdict.witness, spec_name))
        sys.stdout.write(text)
        if emit:
            Path(emit).write_text(text)
            log.success(f"Witness → {emit}")
    if verdict.certificate is not None:
        for line in _format_certificate(verdict.certificate):
            log.info(line)
    return EXIT_CONSISTENT if verdict.consistent else EXIT_INCONSISTENT


def _exit_for(ok: bool) -> int:
    return EXIT_CONSISTENT if ok else EXIT_INCONSISTENT


def _check_order(args: argparse.Namespace) -> int:
    doc = read_document(args.trace)
    spec = _spec(args, doc)
    spec_name = args.spec or doc.spec
    observer = args.command == "check-lin"
    if args.validate_only:
        witness = read_document(args.validate_only).trace
        ok = validate_witness(doc.trace, witness, spec, observer=observer)
        log.verdict(f"witness {'valid' if ok else 'invalid'} for {args.trace}", ok)
        return _exit_for(ok)
    check = check_lin if observer else check_sc
    label = "linearizability" if observer else "sequential consistency"
    return _report(label, check(doc.trace, spec, _budget(args), args.jobs), args.emit, spec_name)


def _check_ec(args: argparse.Namespace) -> int:
    trace = read_document(args.trace).trace
    if args.validate_only:
        witness = read_document(args.validate_only).trace
        ok = validate_ec_witness(trace, witness)
        log.verdict(f"witness {'valid' if ok else 'invalid'} for {args.trace}", ok)
        return _exit_for(ok)
    methods = ["axiomatic", "epistemic"] if args.method == "both" else [args.method]
    verdicts = check_ec(trace, methods, _budget(args), args.jobs)
    outcomes = [verdict.consistent for verdict in verdicts.values()]
    for method, verdict in verdicts.items():
        emit = args.emit if method == "epistemic" else None
        _report(f"eventual consistency ({method})", verdict, emit)
    if len(set(outcomes)) > 1:
        log.warning("axiomatic and epistemic verdicts disagree")
    return _exit_for(all(outcomes))


def _eval(args: argparse.Namespace) -> int:
    formula = parse_formula(args.formula)
    doc = read_document(args.trace)
    evaluator = Evaluator(spec=_spec(args, doc), semantics=args.semantics, budget=_budget(args))
    point = len(doc.trace) if args.at is None else args.at
    truth = evaluator.eval(doc.trace, point, formula)
    log.verdict(f"{'true' if truth else 'false'} at {point}", truth)
    return _exit_for(truth)


def _detect(args: argparse.Namespace) -> int:
    doc = read_document(args.trace)
    spec = _spec(args, doc)
    report = detect_lin(doc.trace, spec) if args.property == "lin" else detect_sc(doc.trace, spec)
    log.verdict(str(report), report.holds)
    log.info(f"  positive detection: {report.positive_detected}")
    log.info(f"  negative detection: {report.negative_detected}")
    return _exit_for(report.holds)


def _theorems(args: argparse.Namespace) -> int:
    results = run_suites(
        args.suite or SUITES,
        max_events=args.max_events,
        count=args.count,
        seed=args.seed,
        jobs=args.jobs,
        spec_name=args.spec,
    )
    for res in results:
        log.verdict(f"{res.name}: {res.checked} traces, {len(res.failures)} failures", res.ok)
        if res.failures:
            log.bullet_list("  first failures:", res.failures[:5])
    return _exit_for(all(res.ok for res in results))


def _corpus(args: argparse.Namespace) -> Iterable[Trace]:
    names = tuple(name.strip() for name in args.threads.split(",") if name.strip())
    split = args.corpus == "register-split"
    if args.exhaustive:
        if args.corpus == "ec":
            return all_ec_traces(args.max_events, names)
        return all_register_traces(args.max_events, names, split=split)
    rng = random.Random(args.seed)
    if args.corpus == "ec":
        return [random_ec_trace(rng, args.max_events, names) for _ in range(args.count)]
    return [random_register_trace(rng, args.max_events, names, split=split) for _ in range(args.count)]


def _generate(args: argparse.Namespace) -> int:
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    total = 0
    for total, trace in enumerate(_corpus(args), start=1):
        text = format_trace(trace)
        if out:
            (out / f"trace-{total:06d}.trace").write_text(text)
        else:
            sys.stdout.write(text + "\n")
    if out:
        log.success(f"{total} traces → {out}")
    return EXIT_CONSISTENT


def _print(args: argparse.Namespace) -> int:
    doc = read_document(args.trace)
    if args.split:
        doc = document_for(split_calls(doc.trace), doc.spec)
    sys.stdout.write(format_trace(doc))
    return EXIT_CONSISTENT


HANDLERS = {
    "check-sc": _check_order,
    "check-lin": _check_order,
    "check-ec": _check_ec,
    "eval": _eval,
    "detect": _detect,
    "theorems": _theorems,
    "generate": _generate,
    "print": _print,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except BudgetExceeded as exc:
        log.warning(f"unknown: {exc}")
        return EXIT_UNKNOWN
    except TraceSyntaxError as exc:
        log.error(f"syntax error at {exc}")
        return EXIT_USAGE
    except (PreconditionError, ConfigurationError, OSError) as exc:
        log.error(str(exc))
        return EXIT_USAGE
