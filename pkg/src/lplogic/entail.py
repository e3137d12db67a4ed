"""Probabilistic entailment over monadic formulas in one variable.

Every truth assignment to the atoms is a world with an unknown weight.
Each base constraint becomes a linear row over the world weights, and
the tight bounds on a query are the minimum and maximum of its
(possibly fractional) objective over the resulting polytope.

Strict inequalities are optimized over their closure; an endpoint that
no strictly feasible point attains is reported as open.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from lplogic import simplex
from lplogic.core import (
    And, CondProb, Equal, Geq, Gt, Implies, InInterval, Leq, LpError, Lt, Not,
    Num, Or, Pred, ProbTerm, Var, Vocabulary, predicates_in,
)
from lplogic.parser import parse
from lplogic.printer import format_rational, pretty

MAX_ATOMS = 20


class TooManyAtoms(LpError):
    pass


class OutsideFragment(LpError):
    pass


class UndefinedQuery(LpError):
    """The base forces the conditioning event of the query to have measure zero."""


class _Infeasible:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFEASIBLE"

    def __str__(self):
        return "INFEASIBLE"

    def __bool__(self):
        return False


INFEASIBLE = _Infeasible()


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not 0 <= self.lo <= self.hi <= 1:
            raise ValueError(f"not a probability interval: [{self.lo}, {self.hi}]")

    def __str__(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{format_rational(self.lo)}, {format_rational(self.hi)}{right}"

    def __contains__(self, value) -> bool:
        value = Fraction(value)
        above = value > self.lo or (value == self.lo and not self.lo_open)
        below = value < self.hi or (value == self.hi and not self.hi_open)
        return above and below

    @property
    def vacuous(self) -> bool:
        return self.lo == 0 and self.hi == 1 and not (self.lo_open or self.hi_open)

    def as_dict(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi),
                "lo_open": self.lo_open, "hi_open": self.hi_open}


@dataclass(frozen=True)
class Constraint:
    """``op`` is one of ``= >= <= > < in``; ``in`` uses ``value..hi`` (closed)."""
    op: str
    value: Fraction
    hi: Optional[Fraction] = None

    def __post_init__(self):
        if self.op not in ("=", ">=", "<=", ">", "<", "in"):
            raise ValueError(f"unknown constraint operator {self.op!r}")
        object.__setattr__(self, "value", Fraction(self.value))
        if self.op == "in":
            if self.hi is None:
                raise ValueError("interval constraint needs an upper end")
            object.__setattr__(self, "hi", Fraction(self.hi))
        for v in (self.value, self.hi):
            if v is not None and not 0 <= v <= 1:
                raise ValueError(f"probability bound {v} outside [0, 1]")

    @classmethod
    def between(cls, lo, hi) -> "Constraint":
        return cls("in", lo, hi)

    def __str__(self):
        if self.op == "in":
            return f"in [{format_rational(self.value)}, {format_rational(self.hi)}]"
        return f"{self.op} {format_rational(self.value)}"


@dataclass(frozen=True)
class BaseConstraint:
    """``[formula | given] op value``; ``given=None`` means unconditional."""
    formula: object
    constraint: Constraint
    given: object = None


@dataclass
class EntailmentProblem:
    atoms: List[str]
    base: List[BaseConstraint]
    query: object
    query_given: object = None

    def __post_init__(self):
        seen = list(self.atoms)
        for f in [b.formula for b in self.base] + [b.given for b in self.base if b.given is not None] \
                + [self.query] + ([self.query_given] if self.query_given is not None else []):
            _check_monadic(f)
            for name in predicates_in(f):
                if name not in seen:
                    seen.append(name)
        self.atoms = seen


@dataclass
class LinearProgram:
    """Rows over world weights; ``strict`` rows hold with ``>``/``<`` before relaxation."""
    worlds: List[Tuple[bool, ...]]
    rows: List[Tuple[List[Fraction], str, Fraction]]
    strict: List[bool]
    labels: List[str]
    objective: List[Fraction]
    denominator: Optional[List[Fraction]] = None


def _check_monadic(f) -> None:
    if isinstance(f, Pred):
        if len(f.args) != 1 or not isinstance(f.args[0], Var):
            raise OutsideFragment(f"{pretty(f)} is not a monadic atom over a variable", f.span)
        return
    if isinstance(f, Not):
        _check_monadic(f.body)
        return
    if isinstance(f, (And, Or, Implies)):
        _check_monadic(f.left)
        _check_monadic(f.right)
        return
    raise OutsideFragment(f"{pretty(f)} is outside the quantifier-free monadic fragment",
                          getattr(f, "span", None))


def truth(f, world: dict) -> bool:
    """Truth of a monadic boolean combination in a world (atom name -> bool)."""
    if isinstance(f, Pred):
        return world[f.name]
    if isinstance(f, Not):
        return not truth(f.body, world)
    if isinstance(f, And):
        return truth(f.left, world) and truth(f.right, world)
    if isinstance(f, Or):
        return truth(f.left, world) or truth(f.right, world)
    if isinstance(f, Implies):
        return (not truth(f.left, world)) or truth(f.right, world)
    raise OutsideFragment(f"cannot evaluate {f!r} in a world")


def worlds_for(atoms: Sequence[str]) -> List[Tuple[bool, ...]]:
    return list(itertools.product((True, False), repeat=len(atoms)))


def build_lp(problem: EntailmentProblem) -> LinearProgram:
    k = len(problem.atoms)
    if k > MAX_ATOMS:
        raise TooManyAtoms(f"{k} atoms exceed the limit of {MAX_ATOMS}")
    worlds = worlds_for(problem.atoms)
    named = [dict(zip(problem.atoms, w)) for w in worlds]

    def indicator(f) -> List[Fraction]:
        return [Fraction(int(truth(f, w))) for w in named]

    rows, strict, labels = [], [], []

    def add(coeffs, sense, rhs, is_strict, label):
        rows.append((coeffs, sense, Fraction(rhs)))
        strict.append(is_strict)
        labels.append(label)

    for item in problem.base:
        c = item.constraint
        bounds = [(c.value, ">="), (c.hi, "<=")] if c.op == "in" else \
            [(c.value, {"=": "=", ">=": ">=", ">": ">=", "<=": "<=", "<": "<="}[c.op])]
        is_strict = c.op in (">", "<")
        if item.given is None:
            label = f"[{pretty(item.formula)}] {c}"
            ind = indicator(item.formula)
            for value, sense in bounds:
                add(ind, sense, value, is_strict, label)
        else:
            label = f"[{pretty(item.formula)} | {pretty(item.given)}] {c}"
            joint = indicator(And(item.formula, item.given))
            cond = indicator(item.given)
            for value, sense in bounds:
                add([a - value * b for a, b in zip(joint, cond)], sense, 0, is_strict, label)
            add(cond, ">=", 0, True, f"[{pretty(item.given)}] > 0")
    add([Fraction(1)] * len(worlds), "=", 1, False, "normalization")

    if problem.query_given is None:
        objective = indicator(problem.query)
        denominator = None
    else:
        objective = indicator(And(problem.query, problem.query_given))
        denominator = indicator(problem.query_given)
    return LinearProgram(worlds, rows, strict, labels, objective, denominator)


def _charnes_cooper(lp: LinearProgram):
    """Rows over ``(q, t)`` with ``q = t p`` and ``t = 1 / denominator(p)``."""
    rows = []
    for coeffs, sense, rhs in lp.rows:
        rows.append((list(coeffs) + [-rhs], sense, Fraction(0)))
    rows.append((list(lp.denominator) + [Fraction(0)], "=", Fraction(1)))
    strict = list(lp.strict) + [False]
    objective = list(lp.objective) + [Fraction(0)]
    return rows, strict, objective


def _with_slack(rows, strict, extra=()):
    """Append an ``eps`` column that tightens every strict row; cap ``eps <= 1``."""
    out = []
    for (coeffs, sense, rhs), s in zip(rows, strict):
        e = Fraction(0)
        if s:
            e = Fraction(-1) if sense == ">=" else Fraction(1)
        out.append((list(coeffs) + [e], sense, rhs))
    n = len(rows[0][0])
    for coeffs, sense, rhs in extra:
        out.append((list(coeffs) + [Fraction(0)], sense, rhs))
    out.append(([Fraction(0)] * n + [Fraction(1)], "<=", Fraction(1)))
    return out


def _strictly_attainable(rows, strict, extra=()) -> bool:
    if not any(strict):
        return simplex.feasible(len(rows[0][0]), list(rows) + list(extra))
    tightened = _with_slack(rows, strict, extra)
    n = len(tightened[0][0])
    c = [Fraction(0)] * (n - 1) + [Fraction(1)]
    res = simplex.solve(c, tightened, maximize=True)
    return res.status == simplex.OPTIMAL and res.value > 0


def bounds(problem: EntailmentProblem):
    """Tight interval for the query, or :data:`INFEASIBLE`."""
    lp = build_lp(problem)
    if not _strictly_attainable(lp.rows, lp.strict):
        return INFEASIBLE
    if lp.denominator is None:
        rows, strict, objective = lp.rows, lp.strict, lp.objective
    else:
        if not _strictly_attainable(lp.rows + [(lp.denominator, ">=", Fraction(0))],
                                    lp.strict + [True]):
            raise UndefinedQuery("the base forces the query's conditioning event to measure zero")
        rows, strict, objective = _charnes_cooper(lp)
    lo = simplex.solve(objective, rows).value
    hi = simplex.solve(objective, rows, maximize=True).value
    lo_open = not _strictly_attainable(rows, strict, [(objective, "=", lo)])
    hi_open = not _strictly_attainable(rows, strict, [(objective, "=", hi)])
    return Interval(lo, hi, lo_open, hi_open)


# ----------------------------------------------------------------------
# Lp sentences in the monadic fragment

_FLIP = {Equal: "=", Geq: "<=", Leq: ">=", Gt: "<", Lt: ">"}
_OPS = {Equal: "=", Geq: ">=", Leq: "<=", Gt: ">", Lt: "<"}


def _prob_parts(t) -> Tuple[object, object]:
    """``(body, given)`` of a one-variable probability term, renamed to share no variable."""
    if isinstance(t, ProbTerm):
        body, given = t.body, None
    elif isinstance(t, CondProb):
        body, given = t.body, t.given
    else:
        raise OutsideFragment(f"{pretty(t)} is not a probability term", getattr(t, "span", None))
    if len(t.vars) != 1:
        raise OutsideFragment(f"{pretty(t)} binds {len(t.vars)} variables; exactly one is supported", t.span)
    for part in (body, given):
        if part is None:
            continue
        _check_monadic(part)
        for node in _atoms(part):
            if node.args[0].name != t.vars[0]:
                raise OutsideFragment(f"{pretty(node)} does not use the bound variable {t.vars[0]}", node.span)
    return body, given


def _atoms(f):
    if isinstance(f, Pred):
        yield f
    elif isinstance(f, Not):
        yield from _atoms(f.body)
    else:
        yield from _atoms(f.left)
        yield from _atoms(f.right)


def _number(t) -> Fraction:
    if isinstance(t, Num):
        return t.value
    raise OutsideFragment(f"{pretty(t)} is not a rational constant", getattr(t, "span", None))


def sentence_constraints(node) -> List[BaseConstraint]:
    """Base constraints expressed by one fragment sentence."""
    if isinstance(node, And):
        return sentence_constraints(node.left) + sentence_constraints(node.right)
    if isinstance(node, InInterval):
        body, given = _prob_parts(node.term)
        return [BaseConstraint(body, Constraint.between(_number(node.lo), _number(node.hi)), given)]
    if type(node) in _OPS:
        left_prob = isinstance(node.left, (ProbTerm, CondProb))
        term, other = (node.left, node.right) if left_prob else (node.right, node.left)
        op = _OPS[type(node)] if left_prob else _FLIP[type(node)]
        body, given = _prob_parts(term)
        try:
            return [BaseConstraint(body, Constraint(op, _number(other)), given)]
        except ValueError as e:
            raise OutsideFragment(str(e), node.span) from None
    raise OutsideFragment(f"{pretty(node)} is not a constraint on a probability term",
                          getattr(node, "span", None))


def _as_node(item, vocab: Optional[Vocabulary]):
    if isinstance(item, str):
        return parse(item, vocab, implicit=True)
    return item


def problem_from_sentences(sentences: Sequence, query, vocab: Optional[Vocabulary] = None) -> EntailmentProblem:
    base: List[BaseConstraint] = []
    for s in sentences:
        base.extend(sentence_constraints(_as_node(s, vocab)))
    q = _as_node(query, vocab)
    body, given = _prob_parts(q)
    return EntailmentProblem([], base, body, given)


def entail_lp_sentences(sentences: Sequence, query, vocab: Optional[Vocabulary] = None):
    """Bounds on ``query`` entailed by fragment ``sentences`` (strings or parsed nodes)."""
    return bounds(problem_from_sentences(sentences, query, vocab))
