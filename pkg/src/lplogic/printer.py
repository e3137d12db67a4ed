"""Pretty-printer producing the canonical text form accepted by the parser."""

from __future__ import annotations

from fractions import Fraction

from lplogic.core import (
    FIELD, OBJECT, And, BinOp, CondProb, Const, Equal, Exists, FieldApp, Forall, Geq,
    Gt, Implies, InInterval, Leq, Lt, MeasureApp, Not, Num, ObjectApp, Or, Pred,
    ProbTerm, Var, Vocabulary,
)

_QUANT, _IMPLIES, _OR, _AND, _NOT, _CMP, _ADD, _MUL, _ATOM = range(9)

_CMP_TEXT = {Equal: "=", Geq: ">=", Leq: "<=", Gt: ">", Lt: "<"}


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def pretty(node) -> str:
    """Canonical text for a term or formula, minimally parenthesized."""
    return _fmt(node, False)[0]


def _wrap(node, in_bracket: bool, minimum: int) -> str:
    text, prec = _fmt(node, in_bracket)
    if prec < minimum or prec == _QUANT:
        return f"({text})"
    return text


def _fmt(node, b: bool):
    if isinstance(node, (Var, Const)):
        return node.name, _ATOM
    if isinstance(node, Num):
        return format_rational(node.value), _ATOM
    if isinstance(node, (ObjectApp, FieldApp, MeasureApp)):
        return f"{node.func}({', '.join(_wrap(a, b, _ADD) for a in node.args)})", _ATOM
    if isinstance(node, Pred):
        return f"{node.name}({', '.join(_wrap(a, b, _ADD) for a in node.args)})", _ATOM
    if isinstance(node, BinOp):
        prec = _ADD if node.op in "+-" else _MUL
        left = _wrap(node.left, b, prec)
        right = _wrap(node.right, b, prec + 1)
        return f"{left} {node.op} {right}", prec
    if isinstance(node, ProbTerm):
        return f"[{_fmt(node.body, True)[0]}]{{{','.join(node.vars)}}}", _ATOM
    if isinstance(node, CondProb):
        body = _fmt(node.body, True)[0]
        given = _fmt(node.given, True)[0]
        return f"[{body} | {given}]{{{','.join(node.vars)}}}", _ATOM
    if type(node) in _CMP_TEXT:
        left = _wrap(node.left, b, _ADD)
        right = _wrap(node.right, b, _ADD)
        return f"{left} {_CMP_TEXT[type(node)]} {right}", _CMP
    if isinstance(node, InInterval):
        t, lo, hi = (_wrap(x, b, _ADD) for x in (node.term, node.lo, node.hi))
        return f"{t} in [{lo}, {hi}]", _CMP
    if isinstance(node, Not):
        return "!" + _wrap(node.body, b, _NOT), _NOT
    if isinstance(node, And):
        return f"{_wrap(node.left, b, _AND)} & {_wrap(node.right, b, _AND + 1)}", _AND
    if isinstance(node, Or):
        bar = " or " if b else " | "
        return f"{_wrap(node.left, b, _OR)}{bar}{_wrap(node.right, b, _OR + 1)}", _OR
    if isinstance(node, Implies):
        return f"{_wrap(node.left, b, _IMPLIES + 1)} -> {_wrap(node.right, b, _IMPLIES)}", _IMPLIES
    if isinstance(node, (Forall, Exists)):
        kind = type(node)
        binders = []
        while type(node) is kind:
            v = node.var
            binders.append(f"{v.name}:field" if v.sort is FIELD else v.name)
            node = node.body
        word = "forall" if kind is Forall else "exists"
        return f"{word} {' '.join(binders)}. {_fmt(node, b)[0]}", _QUANT
    raise TypeError(f"not an Lp node: {node!r}")


def format_vocabulary(vocab: Vocabulary) -> list:
    """Declaration lines that rebuild ``vocab`` (builtins excluded)."""
    lines = []
    for name, sorts in vocab.predicates.items():
        sort = sorts[0] if sorts else OBJECT
        lines.append(f"{sort.value} pred {name}/{len(sorts)};")
    for name, (args, result) in vocab.functions.items():
        lines.append(f"{result.value} func {name}/{len(args)};")
    for name, arity in vocab.measures.items():
        lines.append(f"measure {name}/{arity};")
    for name, sort in vocab.constants.items():
        lines.append(f"{sort.value} const {name};")
    for name, sort in vocab.variables.items():
        lines.append(f"{sort.value} var {name};")
    return lines


def format_document(vocab: Vocabulary, nodes) -> str:
    """A ``.lp`` file: declaration header, blank line, one sentence per line."""
    lines = format_vocabulary(vocab)
    if lines and nodes:
        lines.append("")
    lines.extend(pretty(n) + ";" for n in nodes)
    return "\n".join(lines) + "\n"
