"""Command-line front end: ``lplogic <command> ...``.

Exit status is 0 on success, 1 when a check fails, an entailment is
infeasible or an evaluation is undefined, and 2 for usage, syntax and
file-format errors.
"""

from __future__ import annotations

import argparse
import difflib
import io
import json
import sys
import warnings
from importlib.resources import files
from pathlib import Path
from typing import List, Optional, TextIO

from lplogic import __version__, model
from lplogic.axioms import run_suite
from lplogic.bayes import (
    build_joint, load_net, net_to_lp, parse_literal, query as bayes_query, query_term,
    verify_negation_uniform, NetError,
)
from lplogic.belief import believe, load_kb
from lplogic.core import (
    LpError, SortMismatch, UnknownSymbol, DuplicateBoundVariable, DuplicateSymbol,
    is_formula,
)
from lplogic.entail import INFEASIBLE, OutsideFragment, TooManyAtoms, entail_lp_sentences
from lplogic.evaluate import DEFAULT_MAX_ENUM, Evaluator, eval_formula, eval_term
from lplogic.model import (
    ArityMismatch, FormatError, InterpretationError, IoError, MeasureNotNormalized, read_text,
)
from lplogic.parser import LexError, LpSyntaxError, parse, parse_document
from lplogic.printer import format_document, format_rational, pretty

OUTPUT_VERSION = 1

# errors that mean the input was malformed rather than that a check failed
USAGE_ERRORS = (FormatError, IoError, LexError, LpSyntaxError, UnknownSymbol, SortMismatch,
                DuplicateBoundVariable, DuplicateSymbol, OutsideFragment, TooManyAtoms, NetError,
                MeasureNotNormalized, InterpretationError, ArityMismatch)


class _Usage(Exception):
    pass


def _emit(out: TextIO, args, command: str, payload: dict, human: List[str]) -> None:
    if args.format == "structured":
        doc = {"version": OUTPUT_VERSION, "command": command, **payload}
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        out.write("".join(line + "\n" for line in human))


def _value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return format_rational(v)


# ----------------------------------------------------------------------
# commands

def cmd_parse(args, out: TextIO) -> int:
    vocab, nodes = parse_document(read_text(args.file), implicit=args.implicit)
    if not nodes:
        raise LpSyntaxError(f"{args.file}: empty input")
    text = format_document(vocab, nodes)
    _emit(out, args, "parse", {"sentences": [pretty(n) for n in nodes]}, [text.rstrip("\n")])
    return 0


def cmd_eval(args, out: TextIO) -> int:
    vocab, struct = model.load(args.model)
    _, nodes = parse_document(read_text(args.sentences), vocab)
    ev = Evaluator(struct, args.max_enum)
    rows = []
    for node in nodes:
        if is_formula(node):
            value = eval_formula(struct, {}, node, evaluator=ev)
        else:
            value = eval_term(struct, {}, node, evaluator=ev)
        rows.append((pretty(node), _value_text(value)))
    _emit(out, args, "eval", {"results": [{"sentence": s, "value": v} for s, v in rows]},
          [f"{s}\t{v}" for s, v in rows])
    return 0


def cmd_entail(args, out: TextIO) -> int:
    vocab, nodes = parse_document(read_text(args.sentences), implicit=True)
    results = []
    for q in args.query:
        term = parse(q, vocab, implicit=True)
        results.append((pretty(term), entail_lp_sentences(nodes, term, vocab)))
    infeasible = any(iv is INFEASIBLE for _, iv in results)
    payload = {"infeasible": infeasible,
               "results": [{"query": q, "interval": None if iv is INFEASIBLE else iv.as_dict()}
                           for q, iv in results]}
    _emit(out, args, "entail", payload, [f"{q}\t{iv}" for q, iv in results])
    if args.report_dir and not infeasible:
        from lplogic.report import interval_report
        _report_paths(interval_report(args.report_dir, "entail", results))
    return 1 if infeasible else 0


def _parse_literal_query(text: str):
    target, _, given = text.partition("|")
    evidence = [parse_literal(t) for t in given.split("&")] if given.strip() else []
    return parse_literal(target), evidence


def cmd_bayes(args, out: TextIO) -> int:
    net = load_net(args.net)
    if args.action == "compile":
        sentences = net_to_lp(net)
        text = format_document(net.vocabulary(), sentences).rstrip("\n")
        _emit(out, args, "bayes compile", {"sentences": [pretty(s) for s in sentences]}, [text])
        return 0
    if args.action == "query":
        if not args.query:
            raise _Usage("bayes query needs --query 'X1 | X2 & !X4'")
        results = []
        for q in args.query:
            target, evidence = _parse_literal_query(q)
            results.append((pretty(query_term(target, evidence)), bayes_query(net, target, evidence)))
        _emit(out, args, "bayes query",
              {"results": [{"term": t, "value": format_rational(v)} for t, v in results]},
              [f"{t}\t{format_rational(v)}" for t, v in results])
        return 0
    joint = build_joint(net)
    sentence_ok = [(pretty(s), eval_formula(joint, {}, s)) for s in net_to_lp(net)]
    report = verify_negation_uniform(net, joint)
    human = [f"sentence\t{'true' if ok else 'false'}\t{s}" for s, ok in sentence_ok]
    human += [f"signed\t{c.pattern}\t{c.status}" for c in report.checks]
    human.append(f"summary\tholds={report.count('holds')}\tfails={report.count('fails')}"
                 f"\tundefined={report.count('undefined')}")
    payload = {
        "sentences": [{"sentence": s, "holds": ok} for s, ok in sentence_ok],
        "signed": [{"signs": c.pattern, "status": c.status,
                    "lhs": None if c.lhs is None else format_rational(c.lhs),
                    "rhs": None if c.rhs is None else format_rational(c.rhs)} for c in report.checks],
        "ok": report.ok and all(ok for _, ok in sentence_ok),
    }
    _emit(out, args, "bayes verify", payload, human)
    if args.report_dir:
        from lplogic.report import negation_report
        _report_paths(negation_report(args.report_dir, report))
    return 0 if payload["ok"] else 1


def cmd_believe(args, out: TextIO) -> int:
    kb = load_kb(args.sentences)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = believe(kb, args.query)
    flags = [name for name in ("vacuous", "reference_class_not_matched") if getattr(result, name)]
    human = [f"term\t{pretty(result.term)}",
             f"interval\t{result.interval}",
             f"reference class\t{pretty(result.reference_class)}"]
    human += [f"provenance\t{pretty(s)}" for s in result.provenance]
    human += [f"flag\t{f}" for f in flags]
    _emit(out, args, "believe", result.as_dict(), human)
    if args.report_dir and not result.infeasible:
        from lplogic.report import interval_report
        _report_paths(interval_report(args.report_dir, "belief", [(pretty(result.term), result.interval)]))
    return 1 if result.infeasible else 0


def _sizes(text: str) -> tuple:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(s) for s in text.split(","))


def cmd_check_axioms(args, out: TextIO) -> int:
    report = run_suite(seed=args.seed, models=args.count, sizes=args.sizes,
                       pairs=args.pairs, inject_bug=args.inject_bug)
    payload = {
        "models": report.models, "pairs": report.pairs, "ok": report.ok,
        "checks": {name: vars(t) for name, t in report.tallies.items()},
        "failures": report.failures[:50],
    }
    _emit(out, args, "check-axioms", payload, report.lines())
    if args.report_dir:
        from lplogic.report import axiom_report
        _report_paths(axiom_report(args.report_dir, report))
    return 0 if report.ok else 1


def examples_dir() -> Path:
    return Path(str(files("lplogic") / "paper-examples"))


def reproduce_cases(root: Path) -> list:
    """``(name, argv, expected exit status)`` for every shipped example."""
    r = lambda name: str(root / name)  # noqa: E731
    return [
        ("representation", ["parse", r("representation.lp")], 0),
        ("decomposition", ["parse", r("decomposition.lp")], 0),
        ("two-atom", ["entail", "--sentences", r("two-atom.lp"), "--query", "[Q(x)]{x}"], 0),
        ("joint-marginals", ["entail", "--sentences", r("joint-marginals.lp"),
                          "--query", "[P(x)]{x}", "--query", "[Q(x)]{x}"], 0),
        ("diamond-compile", ["bayes", "compile", r("diamond.net")], 0),
        ("diamond-verify", ["bayes", "verify", r("diamond.net")], 0),
        ("diamond-query", ["bayes", "query", r("diamond.net"), "--query", "X1 | X2 & !X4"], 0),
        ("tweety-belief", ["believe", "--sentences", r("tweety.kb"), "--query", "Fly(Tweety)"], 0),
        ("penguin-belief", ["believe", "--sentences", r("penguin.kb"), "--query", "Fly(Tweety)"], 0),
        ("tweety-eval", ["eval", "--model", r("tweety.model"), "--sentences", r("tweety-eval.lp")], 0),
        ("penguin-eval", ["eval", "--model", r("tweety.model"), "--sentences", r("penguin-eval.lp")], 1),
    ]


def cmd_reproduce(args, out: TextIO) -> int:
    root = examples_dir()
    golden = root / "golden"
    failed = 0
    for name, argv, want in reproduce_cases(root):
        buf, err = io.StringIO(), io.StringIO()
        code = main(argv, stdout=buf, stderr=err)
        text = buf.getvalue() + err.getvalue().replace(str(root) + "/", "")
        path = golden / f"{name}.out"
        if args.update:
            golden.mkdir(exist_ok=True)
            path.write_text(text, encoding="utf-8")
        expected = path.read_text(encoding="utf-8") if path.exists() else ""
        if code == want and text == expected:
            out.write(f"ok\t{name}\n")
            continue
        failed += 1
        out.write(f"FAIL\t{name}\texit={code} (expected {want})\n")
        out.writelines(difflib.unified_diff(expected.splitlines(True), text.splitlines(True),
                                             f"golden/{name}.out", "actual"))
    out.write(f"{'all examples reproduce' if not failed else f'{failed} example(s) differ'}\n")
    return 1 if failed else 0


# ----------------------------------------------------------------------

_stderr: TextIO = sys.stderr


def _report_paths(paths) -> None:
    for p in paths:
        _stderr.write(f"wrote {p}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--max-enum", type=int, default=DEFAULT_MAX_ENUM,
                        help="cap on tuples enumerated for one probability term")
    common.add_argument("--report-dir", help="write TSV tables and PNG figures here")

    ap = argparse.ArgumentParser(prog="lplogic", description="Probability logic toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="sort-check and pretty-print a sentence file")
    p.add_argument("file")
    p.add_argument("--implicit", action="store_true", help="declare unknown predicates on first use")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="evaluate sentences and terms on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--sentences", required=True)
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("entail", parents=[common], help="tight bounds entailed for probability terms")
    p.add_argument("--sentences", required=True)
    p.add_argument("--query", action="append", required=True)
    p.set_defaults(run=cmd_entail)

    p = sub.add_parser("bayes", parents=[common], help="compile, query or verify a Bayes net")
    p.add_argument("action", choices=("compile", "query", "verify"))
    p.add_argument("net")
    p.add_argument("--query", action="append", help="literal query such as 'X1 | X2 & !X4'")
    p.set_defaults(run=cmd_bayes)

    p = sub.add_parser("believe", parents=[common], help="degree of belief in a ground literal")
    p.add_argument("--sentences", required=True, help="knowledge base file")
    p.add_argument("--query", required=True, help="target, e.g. 'Fly(Tweety)'")
    p.set_defaults(run=cmd_believe)

    p = sub.add_parser("check-axioms", parents=[common], help="run the axiom suite on random models")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--sizes", type=_sizes, default=(1, 2, 3, 4, 5, 6), help="e.g. 1-6 or 2,4")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--inject-bug", action="store_true", help="use a deliberately broken measure")
    p.set_defaults(run=cmd_check_axioms)

    p = sub.add_parser("reproduce", parents=[common], help="run the shipped examples against golden output")
    p.add_argument("--update", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_reproduce)
    return ap


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    global _stderr
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.max_enum < 1:
        err.write("error: --max-enum must be positive\n")
        return 2
    saved, _stderr = _stderr, err
    try:
        return args.run(args, out)
    except _Usage as e:
        err.write(f"error: {e}\n")
        return 2
    except USAGE_ERRORS as e:
        err.write(f"error: {e}\n")
        return 2
    except LpError as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return 1
    finally:
        _stderr = saved


if __name__ == "__main__":
    sys.exit(main())
