"""Concrete text syntax for Lp.

Sentences look like::

    object pred Bird/1, Fly/1;
    object const Tweety;
    field var y;

    [Fly(x) | Bird(x)]{x} > 0.9;
    forall y. [Fly(x) | Bird(x) & weight(x) < y]{x} >= 1/2;

Connectives, loosest first: ``->``, ``|``/``or``, ``&``, ``!``, the
comparisons ``= >= <= > < in``, then ``+ -`` and ``* /``.  Inside a
probability bracket a bare ``|`` is the conditioning bar, so disjunction
there must be written ``or`` (or wrapped in parentheses).
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from lplogic.core import (
    FIELD, OBJECT, And, BinOp, CondProb, Const, Equal, Exists, FieldApp, Forall,
    Geq, Gt, Implies, InInterval, Leq, LpError, Lt, MeasureApp, Not, Num,
    ObjectApp, Or, Pred, ProbTerm, Sort, SourceSpan, UnknownSymbol, Var,
    Vocabulary, is_formula, is_term, well_formed,
)


class LexError(LpError):
    pass


class LpSyntaxError(LpError):
    pass


KEYWORDS = {"forall", "exists", "or", "in"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+/\d+|\d+\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|>=|<=|[&|!=<>+\-*/()\[\]{},.:;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # 'num', 'ident', 'kw', 'op', 'eof'
    text: str
    start: int
    end: int


class _Source:
    """Maps character offsets to byte offsets and line/column pairs."""

    def __init__(self, text: str):
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self.ascii = text.isascii()

    def byte(self, i: int) -> int:
        return i if self.ascii else len(self.text[:i].encode("utf-8"))

    def linecol(self, i: int) -> Tuple[int, int]:
        line = bisect.bisect_right(self.line_starts, i) - 1
        return line + 1, i - self.line_starts[line] + 1

    def span(self, start: int, end: int) -> SourceSpan:
        sl, sc = self.linecol(start)
        el, ec = self.linecol(end)
        return SourceSpan(self.byte(start), self.byte(end), sl, sc, el, ec)


def tokenize(text: str, source: Optional[_Source] = None) -> List[Token]:
    source = source or _Source(text)
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", source.span(pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            if kind == "num" and "/" in value and int(value.split("/")[1]) == 0:
                raise LexError(f"zero denominator in literal {value!r}", source.span(pos, m.end()))
            out.append(Token(kind, value, pos, m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


_DECL_SORTS = {"object": OBJECT, "field": FIELD}
_COMPARE = {"=": Equal, ">=": Geq, "<=": Leq, ">": Gt, "<": Lt}


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary, implicit: bool):
        self.src = _Source(text)
        self.toks = tokenize(text, self.src)
        self.i = 0
        self.vocab = vocab
        self.implicit = implicit
        self.scopes: List[dict] = []
        self.in_bracket = False

    # token helpers ----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail(f"expected {text!r}")
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.fail("expected an identifier")
        self.i += 1
        return t

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise LpSyntaxError(f"{message}, found {found}", self.src.span(tok.start, max(tok.end, tok.start)))

    def span_from(self, start_tok: Token) -> SourceSpan:
        end = self.toks[self.i - 1].end if self.i > 0 else start_tok.end
        return self.src.span(start_tok.start, max(end, start_tok.start))

    def need_formula(self, node, tok: Token):
        if not is_formula(node):
            raise LpSyntaxError("expected a formula, found a term", node.span or self.src.span(tok.start, tok.end))
        return node

    def need_term(self, node, tok: Token):
        if not is_term(node):
            raise LpSyntaxError("expected a term, found a formula", node.span or self.src.span(tok.start, tok.end))
        return node

    # declarations -----------------------------------------------------
    def at_declaration(self) -> bool:
        t, n = self.tok, self.peek()
        if t.kind == "ident" and t.text in _DECL_SORTS:
            return n.kind == "ident" and n.text in ("pred", "const", "var", "func")
        return t.kind == "ident" and t.text == "measure" and n.kind == "ident" and self.peek(2).text == "/"

    def declaration(self) -> None:
        first = self.ident()
        if first.text == "measure":
            kind, sort = "measure", FIELD
        else:
            sort = _DECL_SORTS[first.text]
            kind = self.ident().text
        while True:
            name_tok = self.ident()
            name = name_tok.text
            arity = None
            if kind in ("pred", "func", "measure"):
                self.expect("/")
                if self.tok.kind != "num" or not self.tok.text.isdigit():
                    self.fail("expected an arity")
                arity = int(self.tok.text)
                self.i += 1
            try:
                if kind == "pred":
                    self.vocab.declare_predicate(name, arity, sort)
                elif kind == "func":
                    self.vocab.declare_function(name, arity, sort)
                elif kind == "measure":
                    self.vocab.declare_measure(name, arity)
                elif kind == "const":
                    self.vocab.declare_constant(name, sort)
                else:
                    self.vocab.declare_variable(name, sort)
            except LpError as e:
                raise type(e)(e.message, self.src.span(name_tok.start, name_tok.end)) from None
            if not self.accept(","):
                break
        self.expect(";")

    # formulas ---------------------------------------------------------
    def formula(self):
        return self.implication()

    def implication(self):
        start = self.tok
        left = self.disjunction()
        if self.at("->"):
            op = self.tok
            self.i += 1
            right = self.implication()
            return Implies(self.need_formula(left, start), self.need_formula(right, op),
                           span=self.span_from(start))
        return left

    def at_disjunction(self) -> bool:
        return self.at("or") or (self.at("|") and not self.in_bracket)

    def disjunction(self):
        start = self.tok
        left = self.conjunction()
        while self.at_disjunction():
            op = self.tok
            self.i += 1
            right = self.conjunction()
            left = Or(self.need_formula(left, start), self.need_formula(right, op),
                      span=self.span_from(start))
        return left

    def conjunction(self):
        start = self.tok
        left = self.unary()
        while self.at("&"):
            op = self.tok
            self.i += 1
            right = self.unary()
            left = And(self.need_formula(left, start), self.need_formula(right, op),
                       span=self.span_from(start))
        return left

    def unary(self):
        start = self.tok
        if self.accept("!"):
            body = self.unary()
            return Not(self.need_formula(body, start), span=self.span_from(start))
        if self.at("forall") or self.at("exists"):
            return self.quantifier()
        return self.comparison()

    def quantifier(self):
        start = self.tok
        cls = Forall if start.text == "forall" else Exists
        self.i += 1
        binders = []
        while not self.at("."):
            name = self.ident().text
            if self.accept(":"):
                sort_tok = self.ident()
                if sort_tok.text not in _DECL_SORTS:
                    self.fail("expected 'object' or 'field'", sort_tok)
                sort = _DECL_SORTS[sort_tok.text]
            else:
                sort = self.vocab.variable_sort(name)
            if self.vocab.kind_of(name) not in (None, "variables"):
                self.fail(f"cannot quantify over {self.vocab.kind_of(name)[:-1]} {name!r}", self.toks[self.i - 1])
            binders.append(Var(name, sort))
        if not binders:
            self.fail("expected a variable")
        self.expect(".")
        self.scopes.append({v.name: v.sort for v in binders})
        try:
            body = self.need_formula(self.formula(), start)
        finally:
            self.scopes.pop()
        for v in reversed(binders):
            body = cls(v, body, span=self.span_from(start))
        return body

    def comparison(self):
        start = self.tok
        left = self.additive()
        op = self.tok
        if op.kind == "op" and op.text in _COMPARE:
            self.i += 1
            right = self.additive()
            return _COMPARE[op.text](self.need_term(left, start), self.need_term(right, op),
                                     span=self.span_from(start))
        if self.accept("in"):
            self.expect("[")
            saved, self.in_bracket = self.in_bracket, False
            lo_tok = self.tok
            lo = self.need_term(self.additive(), lo_tok)
            self.expect(",")
            hi_tok = self.tok
            hi = self.need_term(self.additive(), hi_tok)
            self.expect("]")
            self.in_bracket = saved
            return InInterval(self.need_term(left, start), lo, hi, span=self.span_from(start))
        return left

    def additive(self):
        start = self.tok
        left = self.multiplicative()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok
            self.i += 1
            right = self.multiplicative()
            left = BinOp(op.text, self.need_term(left, start), self.need_term(right, op),
                         span=self.span_from(start))
        return left

    def multiplicative(self):
        start = self.tok
        left = self.primary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok
            self.i += 1
            right = self.primary()
            left = BinOp(op.text, self.need_term(left, start), self.need_term(right, op),
                         span=self.span_from(start))
        return left

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(Fraction(t.text), span=self.span_from(t))
        if self.accept("-"):
            if self.tok.kind == "num":
                n = self.tok
                self.i += 1
                return Num(-Fraction(n.text), span=self.span_from(t))
            operand = self.need_term(self.primary(), t)
            return BinOp("-", Num(0), operand, span=self.span_from(t))
        if self.accept("("):
            saved, self.in_bracket = self.in_bracket, False
            inner = self.formula()
            self.expect(")")
            self.in_bracket = saved
            return inner
        if self.at("["):
            return self.probability_term()
        if t.kind == "ident":
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.application()
            self.i += 1
            return self.resolve_name(t)
        self.fail("expected a term or formula")

    def binder_vector(self) -> Tuple[List[str], int]:
        """Read the ``{x,y}`` after the bracket that opens at the current token."""
        depth, j = 0, self.i
        while True:
            tok = self.toks[j]
            if tok.kind == "eof":
                self.fail("unclosed probability bracket")
            if tok.kind == "op" and tok.text == "[":
                depth += 1
            elif tok.kind == "op" and tok.text == "]":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        j += 1
        if not (self.toks[j].kind == "op" and self.toks[j].text == "{"):
            self.fail("expected '{' after probability bracket", self.toks[j])
        names = []
        j += 1
        while True:
            tok = self.toks[j]
            if tok.kind != "ident":
                self.fail("expected a variable in binder vector", tok)
            names.append(tok.text)
            j += 1
            if self.toks[j].kind == "op" and self.toks[j].text == ",":
                j += 1
                continue
            if self.toks[j].kind == "op" and self.toks[j].text == "}":
                return names, j + 1
            self.fail("expected ',' or '}'", self.toks[j])

    def probability_term(self):
        start = self.tok
        names, _ = self.binder_vector()
        self.expect("[")
        saved, self.in_bracket = self.in_bracket, True
        self.scopes.append({n: OBJECT for n in names})
        try:
            body = self.need_formula(self.formula(), start)
            given = None
            if self.at("|"):
                bar = self.tok
                self.i += 1
                given = self.need_formula(self.formula(), bar)
        finally:
            self.scopes.pop()
            self.in_bracket = saved
        self.expect("]")
        self.expect("{")
        while not self.accept("}"):
            self.i += 1
        span = self.span_from(start)
        if given is None:
            return ProbTerm(body, tuple(names), span=span)
        return CondProb(body, given, tuple(names), span=span)

    def resolve_name(self, t: Token):
        name = t.text
        span = self.src.span(t.start, t.end)
        for scope in reversed(self.scopes):
            if name in scope:
                return Var(name, scope[name], span=span)
        kind = self.vocab.kind_of(name)
        if kind == "constants":
            return Const(name, self.vocab.constants[name], span=span)
        if kind in (None, "variables"):
            return Var(name, self.vocab.variable_sort(name), span=span)
        raise LpSyntaxError(f"{kind[:-1]} {name!r} used without arguments", span)

    def application(self):
        name_tok = self.ident()
        name = name_tok.text
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                arg_tok = self.tok
                saved, self.in_bracket = self.in_bracket, False
                args.append(self.need_term(self.additive(), arg_tok))
                self.in_bracket = saved
                if not self.accept(","):
                    break
        self.expect(")")
        args = tuple(args)
        span = self.span_from(name_tok)
        kind = self.vocab.kind_of(name)
        if kind is None and self.implicit:
            self.vocab.declare_predicate(name, len(args), OBJECT)
            kind = "predicates"
        if kind == "predicates":
            return Pred(name, args, span=span)
        if kind == "functions":
            cls = ObjectApp if self.vocab.functions[name][1] is OBJECT else FieldApp
            return cls(name, args, span=span)
        if kind == "builtins":
            return FieldApp(name, args, span=span)
        if kind == "measures":
            return MeasureApp(name, args, span=span)
        if kind is None:
            raise UnknownSymbol(f"undeclared symbol {name!r}", self.src.span(name_tok.start, name_tok.end))
        raise LpSyntaxError(f"{kind[:-1]} {name!r} cannot be applied", self.src.span(name_tok.start, name_tok.end))

    def sentence(self):
        start = self.tok
        if start.kind == "eof":
            self.fail("empty input")
        node = self.formula()
        well_formed(node, self.vocab)
        return node


def parse(text: str, vocab: Optional[Vocabulary] = None, *, implicit: bool = False):
    """Parse one formula or term (a trailing ``;`` is allowed).

    Declarations may precede the sentence. ``vocab`` is not modified; with
    ``implicit=True`` undeclared applied symbols become object predicates.
    """
    p = _Parser(text, (vocab or Vocabulary()).copy(), implicit)
    while p.at_declaration():
        p.declaration()
    node = p.sentence()
    p.accept(";")
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return node


def parse_document(text: str, vocab: Optional[Vocabulary] = None, *,
                   implicit: bool = False) -> Tuple[Vocabulary, list]:
    """Parse a ``.lp`` file: declarations, then ``;``-terminated sentences.

    Returns the extended vocabulary and the list of parsed nodes.
    """
    p = _Parser(text, (vocab or Vocabulary()).copy(), implicit)
    nodes = []
    while p.tok.kind != "eof":
        if p.at_declaration():
            p.declaration()
            continue
        nodes.append(p.sentence())
        if p.tok.kind != "eof":
            p.expect(";")
    return p.vocab, nodes


def parse_vocabulary(text: str, vocab: Optional[Vocabulary] = None) -> Vocabulary:
    """Parse a block consisting only of declarations."""
    p = _Parser(text, (vocab or Vocabulary()).copy(), False)
    while p.tok.kind != "eof":
        if not p.at_declaration():
            p.fail("expected a declaration")
        p.declaration()
    return p.vocab
