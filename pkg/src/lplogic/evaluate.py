"""Truth and value of Lp formulas and terms over a finite structure.

Probability terms are evaluated by enumerating every tuple of the domain
for the bound vector and summing the product weights of the satisfying
ones.  Undefined values (division by zero) raise :class:`DivisionByZero`,
except that a false conjunct or a false instance of a universal absorbs
an undefined one, so ``[B]{x} > 0 -> [A | B]{x} > 1/2`` is well defined
even when ``[B]{x} = 0``.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from fractions import Fraction
from typing import Optional

from lplogic.core import (
    FIELD, OBJECT, And, BinOp, Const, Equal, FieldApp, Forall, Geq, LpError,
    MeasureApp, Not, Num, ObjectApp, Pred, ProbTerm, Var, children, desugar,
    free_vars,
)
from lplogic.model import InterpretationError, LpStructure

DEFAULT_MAX_ENUM = 10 ** 7


class DivisionByZero(LpError):
    pass


class UnboundVariable(LpError):
    pass


class FieldQuantifierUnsupported(LpError):
    pass


class EnumerationCapExceeded(LpError):
    pass


class Assignment(Mapping):
    """Immutable variable assignment; :meth:`bind` returns an updated copy."""

    __slots__ = ("_values",)

    def __init__(self, values=None, **kw):
        self._values = dict(values or {}, **kw)

    def __getitem__(self, name):
        return self._values[name]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def bind(self, names, values) -> "Assignment":
        out = dict(self._values)
        out.update(zip(names, values))
        return Assignment(out)

    def __repr__(self):
        return f"Assignment({self._values!r})"


class Evaluator:
    """Evaluates core-language nodes; caches probability-term values."""

    def __init__(self, struct: LpStructure, max_enum: int = DEFAULT_MAX_ENUM):
        self.struct = struct
        self.max_enum = max_enum
        self.domain = struct.domain
        self._weights = [struct.weights[a] for a in struct.domain]
        self._cache: dict = {}
        self._products: dict = {}

    # formulas ---------------------------------------------------------
    def formula(self, phi, env: dict) -> bool:
        if isinstance(phi, Pred):
            args = tuple(self.term(a, env) for a in phi.args)
            try:
                return args in self.struct.predicates[phi.name]
            except KeyError:
                raise InterpretationError(f"predicate {phi.name} has no interpretation") from None
        if isinstance(phi, Geq):
            return self.term(phi.left, env) >= self.term(phi.right, env)
        if isinstance(phi, Equal):
            return self.term(phi.left, env) == self.term(phi.right, env)
        if isinstance(phi, Not):
            return not self.formula(phi.body, env)
        if isinstance(phi, And):
            return self._all((phi.left, env), (phi.right, env))
        if isinstance(phi, Forall):
            v = phi.var
            if v.sort is FIELD:
                points = test_points(self._critical_values(phi.body, v.name, env))
            else:
                points = self.domain
            return self._all(*((phi.body, {**env, v.name: p}) for p in points))
        raise TypeError(f"not a core formula (desugar first): {phi!r}")

    def _all(self, *cases) -> bool:
        pending = None
        for phi, env in cases:
            try:
                if not self.formula(phi, env):
                    return False
            except DivisionByZero as e:
                pending = pending or e
        if pending is not None:
            raise pending
        return True

    # terms ------------------------------------------------------------
    def term(self, t, env: dict):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable(f"variable {t.name!r} is unbound", t.span) from None
        if isinstance(t, Num):
            return t.value
        if isinstance(t, Const):
            pool = self.struct.constants if t.sort is OBJECT else self.struct.field_constants
            try:
                return pool[t.name]
            except KeyError:
                raise InterpretationError(f"constant {t.name} has no interpretation") from None
        if isinstance(t, BinOp):
            a, b = self.term(t.left, env), self.term(t.right, env)
            if t.op == "+":
                return a + b
            if t.op == "-":
                return a - b
            if t.op == "*":
                return a * b
            if b == 0:
                raise DivisionByZero(f"division by zero in {_show(t)}", t.span)
            return a / b
        if isinstance(t, ProbTerm):
            return self._probability(t, env)
        if isinstance(t, MeasureApp):
            args = tuple(self.term(a, env) for a in t.args)
            try:
                return self.struct.measuring[t.func][args]
            except KeyError:
                raise InterpretationError(f"measuring function {t.func} undefined at {args}") from None
        if isinstance(t, ObjectApp):
            args = tuple(self.term(a, env) for a in t.args)
            try:
                return self.struct.functions[t.func][args]
            except KeyError:
                raise InterpretationError(f"function {t.func} undefined at {args}") from None
        if isinstance(t, FieldApp):
            hook = self.struct.field_functions.get(t.func)
            if hook is None:
                raise InterpretationError(f"no evaluation hook for field function {t.func}")
            value = hook(*(self.term(a, env) for a in t.args))
            if isinstance(value, float) or not isinstance(value, (int, Fraction)):
                raise InterpretationError(f"field function {t.func} returned non-rational {value!r}")
            return Fraction(value)
        raise TypeError(f"not a core term (desugar first): {t!r}")

    def _tuples(self, n: int):
        try:
            return self._products[n]
        except KeyError:
            pass
        size = len(self.domain) ** n
        if size > self.max_enum:
            raise EnumerationCapExceeded(
                f"probability term over {n} variables needs {size} evaluations (cap {self.max_enum})")
        out = []
        for idx in itertools.product(range(len(self.domain)), repeat=n):
            w = Fraction(1)
            for i in idx:
                w *= self._weights[i]
            out.append((tuple(self.domain[i] for i in idx), w))
        self._products[n] = out
        return out

    def _probability(self, t: ProbTerm, env: dict) -> Fraction:
        key = (t, tuple(sorted((name, env[name]) for name, _ in free_vars(t) if name in env)))
        try:
            return self._cache[key]
        except KeyError:
            pass
        total = Fraction(0)
        names = t.vars
        inner = dict(env)
        for values, w in self._tuples(len(names)):
            inner.update(zip(names, values))
            if self.formula(t.body, inner):
                total += w
        self._cache[key] = total
        return total

    # field quantifiers ------------------------------------------------
    def _critical_values(self, body, y: str, env: dict) -> set:
        """Values that the matrix compares ``y`` against, over all inner bindings."""
        found: set = set()
        self._scan(body, y, env, (), found)
        return found

    def _scan(self, node, y, env, inner, found):
        target = Var(y, FIELD)
        if node == target:
            raise FieldQuantifierUnsupported(
                f"field variable {y} is used outside a comparison")
        if isinstance(node, (Geq, Equal)) and target in (node.left, node.right):
            other = node.right if node.left == target else node.left
            if other == target:
                return
            if (y, FIELD) in free_vars(other):
                raise FieldQuantifierUnsupported(
                    f"field variable {y} occurs on both sides of {_show(node)}")
            self._collect(other, env, inner, found)
            return
        if isinstance(node, Forall):
            if node.var == target:
                return
            if node.var.sort is FIELD:
                if (y, FIELD) in free_vars(node.body):
                    raise FieldQuantifierUnsupported("nested field quantifiers are not supported")
                return
            self._scan(node.body, y, env, inner + (node.var.name,), found)
            return
        if isinstance(node, ProbTerm):
            self._scan(node.body, y, env, inner + tuple(node.vars), found)
            return
        for child in children(node):
            self._scan(child, y, env, inner, found)

    def _collect(self, t, env, inner, found):
        names = sorted({n for n, s in free_vars(t) if n in inner})
        if any(s is FIELD and n not in env for n, s in free_vars(t)):
            raise FieldQuantifierUnsupported(f"comparison term {_show(t)} depends on another field variable")
        for values in itertools.product(self.domain, repeat=len(names)):
            try:
                found.add(self.term(t, {**env, **dict(zip(names, values))}))
            except DivisionByZero:
                pass


def test_points(values) -> list:
    """Representatives of every cell of the order partition induced by ``values``."""
    vs = sorted(set(values))
    if not vs:
        return [Fraction(0)]
    points = [vs[0] - 1]
    for a, b in zip(vs, vs[1:]):
        points += [a, (a + b) / 2]
    points += [vs[-1], vs[-1] + 1]
    return points


def _show(node) -> str:
    from lplogic.printer import pretty
    try:
        return pretty(node)
    except TypeError:
        return repr(node)


def _env(sigma) -> dict:
    if sigma is None:
        return {}
    return dict(sigma)


def eval_formula(struct: LpStructure, sigma, phi, *, max_enum: int = DEFAULT_MAX_ENUM,
                 evaluator: Optional[Evaluator] = None) -> bool:
    """Truth value of ``phi`` under the assignment ``sigma``."""
    ev = evaluator or Evaluator(struct, max_enum)
    return ev.formula(desugar(phi), _env(sigma))


def eval_term(struct: LpStructure, sigma, t, *, max_enum: int = DEFAULT_MAX_ENUM,
              evaluator: Optional[Evaluator] = None):
    """Individual (object sort) or Fraction (field sort) denoted by ``t``."""
    ev = evaluator or Evaluator(struct, max_enum)
    return ev.term(desugar(t), _env(sigma))
