"""Two-sorted abstract syntax for Lp.

Terms and formulas are frozen dataclasses. Structural equality ignores
source spans, so a parsed tree compares equal to a hand-built one.
Field values are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union


class Sort(enum.Enum):
    OBJECT = "object"
    FIELD = "field"

    def __repr__(self) -> str:
        return f"Sort.{self.name}"


OBJECT = Sort.OBJECT
FIELD = Sort.FIELD


# ----------------------------------------------------------------------
# errors

class LpError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, message: str, span: Optional["SourceSpan"] = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"{self.span.start_line}:{self.span.start_col}: {self.message}"


class SortMismatch(LpError):
    def __init__(self, node, expected: Sort, actual: Sort, span=None):
        self.node = node
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"sort mismatch at {node!s}: expected {expected.value}, got {actual.value}",
            span if span is not None else getattr(node, "span", None),
        )


class UnknownSymbol(LpError):
    pass


class DuplicateBoundVariable(LpError):
    pass


class DuplicateSymbol(LpError):
    pass


# ----------------------------------------------------------------------
# source spans

@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int


def _node(cls):
    """Frozen dataclass whose (structural) hash is computed once."""
    cls = dataclass(frozen=True)(cls)
    generated = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


# ----------------------------------------------------------------------
# terms

@_node
class Var:
    name: str
    sort: Sort = OBJECT
    span: Optional[SourceSpan] = _span()


@_node
class Const:
    name: str
    sort: Sort = OBJECT
    span: Optional[SourceSpan] = _span()


@_node
class Num:
    value: Fraction
    span: Optional[SourceSpan] = _span()

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@_node
class ObjectApp:
    func: str
    args: tuple
    span: Optional[SourceSpan] = _span()


@_node
class FieldApp:
    func: str
    args: tuple
    span: Optional[SourceSpan] = _span()


@_node
class MeasureApp:
    func: str
    args: tuple
    span: Optional[SourceSpan] = _span()


ARITH_OPS = ("+", "-", "*", "/")


@_node
class BinOp:
    """One of the distinguished field functions ``+ - * /``."""
    op: str
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span()


@_node
class ProbTerm:
    body: "Formula"
    vars: tuple
    span: Optional[SourceSpan] = _span()


@_node
class CondProb:
    """``[body | given]{vars}``; sugar for a quotient of probability terms."""
    body: "Formula"
    given: "Formula"
    vars: tuple
    span: Optional[SourceSpan] = _span()


Term = Union[Var, Const, Num, ObjectApp, FieldApp, MeasureApp, BinOp, ProbTerm, CondProb]
TERM_TYPES = (Var, Const, Num, ObjectApp, FieldApp, MeasureApp, BinOp, ProbTerm, CondProb)


# ----------------------------------------------------------------------
# formulas

@_node
class Pred:
    name: str
    args: tuple
    span: Optional[SourceSpan] = _span()


@_node
class Equal:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@_node
class Geq:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@_node
class Not:
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@_node
class And:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@_node
class Forall:
    var: Var
    body: "Formula"
    span: Optional[SourceSpan] = _span()


# derived forms; removed by desugar()

@_node
class Or:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@_node
class Implies:
    left: "Formula"
    right: "Formula"
    span: Optional[SourceSpan] = _span()


@_node
class Exists:
    var: Var
    body: "Formula"
    span: Optional[SourceSpan] = _span()


@_node
class Leq:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@_node
class Lt:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@_node
class Gt:
    left: Term
    right: Term
    span: Optional[SourceSpan] = _span()


@_node
class InInterval:
    term: Term
    lo: Term
    hi: Term
    span: Optional[SourceSpan] = _span()


Formula = Union[Pred, Equal, Geq, Not, And, Forall, Or, Implies, Exists, Leq, Lt, Gt, InInterval]
FORMULA_TYPES = (Pred, Equal, Geq, Not, And, Forall, Or, Implies, Exists, Leq, Lt, Gt, InInterval)
COMPARISONS = (Equal, Geq, Leq, Lt, Gt)
CORE_FORMULA_TYPES = (Pred, Equal, Geq, Not, And, Forall)


def is_term(node) -> bool:
    return isinstance(node, TERM_TYPES)


def is_formula(node) -> bool:
    return isinstance(node, FORMULA_TYPES)


# convenience constructors

def conj(formulas: Iterable) -> "Formula":
    """Left-nested conjunction of a nonempty sequence."""
    it = iter(formulas)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("conj() of an empty sequence") from None
    for f in it:
        acc = And(acc, f)
    return acc


def disj(formulas: Iterable) -> "Formula":
    it = iter(formulas)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("disj() of an empty sequence") from None
    for f in it:
        acc = Or(acc, f)
    return acc


def prob(body, *names: str) -> ProbTerm:
    return ProbTerm(body, tuple(names))


def cond(body, given, *names: str) -> CondProb:
    return CondProb(body, given, tuple(names))


# ----------------------------------------------------------------------
# vocabulary

@dataclass(frozen=True)
class Builtin:
    """Field function with an evaluation hook: total over its arity, exact output."""
    arity: int
    hook: Callable[..., Fraction]


@dataclass
class Vocabulary:
    constants: dict = field(default_factory=dict)       # name -> Sort
    variables: dict = field(default_factory=dict)       # name -> Sort
    functions: dict = field(default_factory=dict)       # name -> (arg sorts, result sort)
    predicates: dict = field(default_factory=dict)      # name -> arg sorts
    measures: dict = field(default_factory=dict)        # name -> arity
    builtins: dict = field(default_factory=dict)        # name -> Builtin

    _CLASSES = ("constants", "variables", "functions", "predicates", "measures", "builtins")

    def kind_of(self, name: str) -> Optional[str]:
        for cls in self._CLASSES:
            if name in getattr(self, cls):
                return cls
        return None

    def _declare(self, cls: str, name: str, value) -> None:
        kind = self.kind_of(name)
        if kind is not None:
            if kind == cls and getattr(self, cls)[name] == value:
                return
            raise DuplicateSymbol(f"symbol {name!r} already declared as {kind}")
        getattr(self, cls)[name] = value

    def declare_constant(self, name: str, sort: Sort = OBJECT) -> None:
        self._declare("constants", name, sort)

    def declare_variable(self, name: str, sort: Sort = OBJECT) -> None:
        self._declare("variables", name, sort)

    def declare_predicate(self, name: str, arity: int, sort: Sort = OBJECT) -> None:
        self._declare("predicates", name, (sort,) * arity)

    def declare_function(self, name: str, arity: int, sort: Sort = OBJECT) -> None:
        self._declare("functions", name, ((sort,) * arity, sort))

    def declare_measure(self, name: str, arity: int) -> None:
        self._declare("measures", name, arity)

    def declare_builtin(self, name: str, arity: int, hook) -> None:
        self._declare("builtins", name, Builtin(arity, hook))

    def copy(self) -> "Vocabulary":
        return Vocabulary(*(dict(getattr(self, c)) for c in self._CLASSES))

    def merged(self, other: "Vocabulary") -> "Vocabulary":
        out = self.copy()
        for cls in ("constants", "variables", "functions", "predicates", "measures", "builtins"):
            for name, value in getattr(other, cls).items():
                out._declare(cls, name, value)
        return out

    def variable_sort(self, name: str) -> Sort:
        return self.variables.get(name, OBJECT)


# ----------------------------------------------------------------------
# sorts and well-formedness

def sort_of(term) -> Sort:
    if isinstance(term, (Var, Const)):
        return term.sort
    if isinstance(term, ObjectApp):
        return OBJECT
    if isinstance(term, TERM_TYPES):
        return FIELD
    raise TypeError(f"not a term: {term!r}")


def _expect(node, expected: Sort) -> None:
    actual = sort_of(node)
    if actual is not expected:
        raise SortMismatch(node, expected, actual)


def _check_vector(node) -> None:
    if not node.vars:
        raise DuplicateBoundVariable(
            f"probability term {node} binds no variables", node.span)
    seen = set()
    for v in node.vars:
        if v in seen:
            raise DuplicateBoundVariable(
                f"variable {v!r} repeated in probability-term vector", node.span)
        seen.add(v)


def well_formed(node, vocab: Vocabulary, _bound: frozenset = frozenset()) -> None:
    """Raise on the first sort error or undeclared symbol; return None if ok."""
    wf = lambda n, b=_bound: well_formed(n, vocab, b)  # noqa: E731

    if isinstance(node, Var):
        declared = vocab.variables.get(node.name)
        if (node.name, node.sort) not in _bound and declared is not None and declared is not node.sort:
            raise SortMismatch(node, declared, node.sort)
        if vocab.kind_of(node.name) not in (None, "variables"):
            raise LpError(f"{node.name!r} is a {vocab.kind_of(node.name)}, not a variable", node.span)
    elif isinstance(node, Const):
        if node.name not in vocab.constants:
            raise UnknownSymbol(f"undeclared constant {node.name!r}", node.span)
        if vocab.constants[node.name] is not node.sort:
            raise SortMismatch(node, vocab.constants[node.name], node.sort)
    elif isinstance(node, Num):
        pass
    elif isinstance(node, ObjectApp):
        sig = vocab.functions.get(node.func)
        if sig is None or sig[1] is not OBJECT:
            raise UnknownSymbol(f"undeclared object function {node.func!r}", node.span)
        _check_args(node, sig[0], wf)
    elif isinstance(node, FieldApp):
        if node.func in vocab.builtins:
            sorts = (FIELD,) * vocab.builtins[node.func].arity
        else:
            sig = vocab.functions.get(node.func)
            if sig is None or sig[1] is not FIELD:
                raise UnknownSymbol(f"undeclared field function {node.func!r}", node.span)
            sorts = sig[0]
        _check_args(node, sorts, wf)
    elif isinstance(node, MeasureApp):
        if node.func not in vocab.measures:
            raise UnknownSymbol(f"undeclared measuring function {node.func!r}", node.span)
        _check_args(node, (OBJECT,) * vocab.measures[node.func], wf)
    elif isinstance(node, BinOp):
        if node.op not in ARITH_OPS:
            raise UnknownSymbol(f"unknown field operator {node.op!r}", node.span)
        for side in (node.left, node.right):
            wf(side)
            _expect(side, FIELD)
    elif isinstance(node, (ProbTerm, CondProb)):
        _check_vector(node)
        inner = _bound | {(v, OBJECT) for v in node.vars}
        wf(node.body, inner)
        if isinstance(node, CondProb):
            wf(node.given, inner)
    elif isinstance(node, Pred):
        sorts = vocab.predicates.get(node.name)
        if sorts is None:
            raise UnknownSymbol(f"undeclared predicate {node.name!r}", node.span)
        _check_args(node, sorts, wf)
    elif isinstance(node, Equal):
        wf(node.left)
        wf(node.right)
        _expect(node.right, sort_of(node.left))
    elif isinstance(node, (Geq, Leq, Lt, Gt)):
        for side in (node.left, node.right):
            wf(side)
            _expect(side, FIELD)
    elif isinstance(node, InInterval):
        for side in (node.term, node.lo, node.hi):
            wf(side)
            _expect(side, FIELD)
    elif isinstance(node, Not):
        wf(node.body)
    elif isinstance(node, (And, Or, Implies)):
        wf(node.left)
        wf(node.right)
    elif isinstance(node, (Forall, Exists)):
        wf(node.body, _bound | {(node.var.name, node.var.sort)})
    else:
        raise TypeError(f"not an Lp node: {node!r}")


def _check_args(node, sorts, wf) -> None:
    name = getattr(node, "func", None) or node.name
    if len(node.args) != len(sorts):
        raise LpError(f"{name} expects {len(sorts)} argument(s), got {len(node.args)}", node.span)
    for arg, expected in zip(node.args, sorts):
        wf(arg)
        _expect(arg, expected)


def is_well_formed(node, vocab: Vocabulary) -> bool:
    try:
        well_formed(node, vocab)
    except LpError:
        return False
    return True


# ----------------------------------------------------------------------
# desugaring

def desugar(node):
    """Rewrite derived connectives and conditional terms into the core language."""
    d = desugar
    if isinstance(node, (Var, Const, Num)):
        return node
    if isinstance(node, ObjectApp):
        return ObjectApp(node.func, tuple(d(a) for a in node.args))
    if isinstance(node, FieldApp):
        return FieldApp(node.func, tuple(d(a) for a in node.args))
    if isinstance(node, MeasureApp):
        return MeasureApp(node.func, tuple(d(a) for a in node.args))
    if isinstance(node, BinOp):
        return BinOp(node.op, d(node.left), d(node.right))
    if isinstance(node, ProbTerm):
        return ProbTerm(d(node.body), node.vars)
    if isinstance(node, CondProb):
        body, given = d(node.body), d(node.given)
        return BinOp("/", ProbTerm(And(body, given), node.vars), ProbTerm(given, node.vars))
    if isinstance(node, Pred):
        return Pred(node.name, tuple(d(a) for a in node.args))
    if isinstance(node, Equal):
        return Equal(d(node.left), d(node.right))
    if isinstance(node, Geq):
        return Geq(d(node.left), d(node.right))
    if isinstance(node, Leq):
        return Geq(d(node.right), d(node.left))
    if isinstance(node, Gt):
        return Not(Geq(d(node.right), d(node.left)))
    if isinstance(node, Lt):
        return Not(Geq(d(node.left), d(node.right)))
    if isinstance(node, InInterval):
        t = d(node.term)
        return And(Geq(t, d(node.lo)), Geq(d(node.hi), t))
    if isinstance(node, Not):
        return Not(d(node.body))
    if isinstance(node, And):
        return And(d(node.left), d(node.right))
    if isinstance(node, Or):
        return Not(And(Not(d(node.left)), Not(d(node.right))))
    if isinstance(node, Implies):
        return Not(And(d(node.left), Not(d(node.right))))
    if isinstance(node, Forall):
        return Forall(node.var, d(node.body))
    if isinstance(node, Exists):
        return Not(Forall(node.var, Not(d(node.body))))
    raise TypeError(f"not an Lp node: {node!r}")


# ----------------------------------------------------------------------
# variables and substitution

def children(node) -> tuple:
    """Immediate sub-nodes, in source order."""
    if isinstance(node, (Var, Const, Num)):
        return ()
    if isinstance(node, (ObjectApp, FieldApp, MeasureApp, Pred)):
        return tuple(node.args)
    if isinstance(node, (BinOp, Equal, Geq, Leq, Lt, Gt, And, Or, Implies)):
        return (node.left, node.right)
    if isinstance(node, ProbTerm):
        return (node.body,)
    if isinstance(node, CondProb):
        return (node.body, node.given)
    if isinstance(node, InInterval):
        return (node.term, node.lo, node.hi)
    if isinstance(node, Not):
        return (node.body,)
    if isinstance(node, (Forall, Exists)):
        return (node.var, node.body)
    raise TypeError(f"not an Lp node: {node!r}")


def walk(node):
    """Pre-order traversal of every sub-node."""
    yield node
    for c in children(node):
        yield from walk(c)


_FV_CACHE: dict = {}


def free_vars(node) -> frozenset:
    """Free variables as a frozenset of ``(name, Sort)`` pairs."""
    try:
        return _FV_CACHE[node]
    except KeyError:
        pass
    if isinstance(node, Var):
        out = frozenset({(node.name, node.sort)})
    elif isinstance(node, (ProbTerm, CondProb)):
        inner = frozenset().union(*(free_vars(c) for c in children(node)))
        out = inner - {(v, OBJECT) for v in node.vars}
    elif isinstance(node, (Forall, Exists)):
        out = free_vars(node.body) - {(node.var.name, node.var.sort)}
    else:
        out = frozenset().union(*(free_vars(c) for c in children(node)))
    if len(_FV_CACHE) > 200_000:
        _FV_CACHE.clear()
    _FV_CACHE[node] = out
    return out


def is_closed(node) -> bool:
    return not free_vars(node)


def names_in(node) -> set:
    """Every identifier occurring anywhere in ``node``."""
    out = set()
    for n in walk(node):
        if isinstance(n, (Var, Const)):
            out.add(n.name)
        elif isinstance(n, (ProbTerm, CondProb)):
            out.update(n.vars)
    return out


_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def fresh_name(base: str, avoid: set) -> str:
    """``base`` with the smallest numeric suffix not in ``avoid``."""
    stem = _SUFFIX.match(base).group(1) or base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(node, mapping: Mapping):
    """Simultaneous capture-avoiding substitution.

    Keys are :class:`Var` or :class:`Const` nodes; a constant key replaces
    every occurrence of that constant (used to generalize a constant into
    a variable). Bound variables that would capture a free variable of a
    replacement are renamed with the smallest unused numeric suffix.
    """
    for key, value in mapping.items():
        if not isinstance(key, (Var, Const)):
            raise TypeError(f"substitution key must be a Var or Const, got {key!r}")
        if sort_of(value) is not key.sort:
            raise SortMismatch(value, key.sort, sort_of(value))
    if not mapping:
        return node
    return _subst(node, dict(mapping))


def _subst(node, mapping):
    if isinstance(node, (Var, Const)):
        return mapping.get(node, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, (ObjectApp, FieldApp, MeasureApp, Pred)):
        args = tuple(_subst(a, mapping) for a in node.args)
        return type(node)(getattr(node, "func", None) or node.name, args)
    if isinstance(node, BinOp):
        return BinOp(node.op, _subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, (Equal, Geq, Leq, Lt, Gt, And, Or, Implies)):
        return type(node)(_subst(node.left, mapping), _subst(node.right, mapping))
    if isinstance(node, InInterval):
        return InInterval(*(_subst(c, mapping) for c in children(node)))
    if isinstance(node, Not):
        return Not(_subst(node.body, mapping))
    if isinstance(node, (Forall, Exists)):
        sort = node.var.sort
        new_names, body_map = _enter_binders(node, [node.var.name], sort, mapping)
        if body_map is None:
            return node
        return type(node)(Var(new_names[0], sort), _subst(node.body, body_map))
    if isinstance(node, (ProbTerm, CondProb)):
        new_names, body_map = _enter_binders(node, list(node.vars), OBJECT, mapping)
        if body_map is None:
            return node
        if isinstance(node, ProbTerm):
            return ProbTerm(_subst(node.body, body_map), tuple(new_names))
        return CondProb(_subst(node.body, body_map), _subst(node.given, body_map), tuple(new_names))
    raise TypeError(f"not an Lp node: {node!r}")


def _enter_binders(node, names, sort, mapping):
    """Adjust ``mapping`` for entering a binder; rename binders that would capture.

    Returns ``(names, mapping)`` or ``(names, None)`` when nothing below
    the binder changes.
    """
    bound = {Var(n, sort) for n in names}
    inner = {k: v for k, v in mapping.items() if k not in bound}
    fv = free_vars(node)
    inner = {k: v for k, v in inner.items()
             if isinstance(k, Const) or (k.name, k.sort) in fv}
    if not inner:
        return names, None
    incoming = set()
    for v in inner.values():
        incoming |= free_vars(v)
    new_names = list(names)
    renames = {}
    avoid = names_in(node) | {n for n, _ in incoming} | {k.name for k in inner}
    for i, n in enumerate(names):
        if (n, sort) in incoming:
            fresh = fresh_name(n, avoid)
            avoid.add(fresh)
            new_names[i] = fresh
            renames[Var(n, sort)] = Var(fresh, sort)
    inner.update(renames)
    return new_names, inner


def constants_in(node) -> list:
    """Distinct constants in first-occurrence order."""
    seen = []
    for n in walk(node):
        if isinstance(n, Const) and n not in seen:
            seen.append(n)
    return seen


def predicates_in(node) -> list:
    seen = []
    for n in walk(node):
        if isinstance(n, Pred) and n.name not in seen:
            seen.append(n.name)
    return seen


def to_fraction(value: Union[int, str, Fraction]) -> Fraction:
    """Exact rational from ``p/q``, a decimal string, an int or a Fraction."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    return Fraction(value)
