"""Bayes nets over binary variables, read as monadic predicates.

A net compiles to Lp sentences (the product decomposition plus one
sentence per CPT row) and to a joint structure with one individual per
truth assignment, weighted by the net's joint probability. Queries are
answered by summing over that joint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from lplogic.core import (
    BinOp, CondProb, Equal, LpError, Not, Num, Pred, ProbTerm, Var, Vocabulary, conj,
    desugar,
)
from lplogic.evaluate import DivisionByZero, Evaluator
from lplogic.model import FormatError, LpStructure, _rational, _split_kv, read_sections, read_text
from lplogic.printer import format_rational

MAX_VARIABLES = 20

Literal = Tuple[str, bool]


class TooManyVariables(LpError):
    pass


class ZeroProbabilityEvidence(LpError):
    pass


class NetError(LpError):
    pass


def parse_literal(text: str) -> Literal:
    text = text.strip()
    positive = True
    while text[:1] in ("!", "~", "-"):
        positive = not positive
        text = text[1:].strip()
    if not text.isidentifier():
        raise NetError(f"not a literal: {text!r}")
    return text, positive


def literal_text(lit: Literal) -> str:
    return lit[0] if lit[1] else "!" + lit[0]


@dataclass(frozen=True)
class BayesNet:
    """``cpt[v]`` maps a tuple of parent truth values (in ``parents[v]`` order) to P(v true)."""

    variables: Tuple[str, ...]
    parents: Dict[str, Tuple[str, ...]]
    cpt: Dict[str, Dict[Tuple[bool, ...], Fraction]]

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if len(set(variables)) != len(variables):
            raise NetError("duplicate variable")
        parents = {v: tuple(self.parents.get(v, ())) for v in variables}
        extra = set(self.parents) - set(variables)
        if extra:
            raise NetError(f"parents given for unknown variables {sorted(extra)}")
        position = {v: i for i, v in enumerate(variables)}
        for v, ps in parents.items():
            for p in ps:
                if p not in position:
                    raise NetError(f"{v} has unknown parent {p}")
                if position[p] >= position[v]:
                    raise NetError(f"parent {p} of {v} must be listed before it")
            if len(set(ps)) != len(ps):
                raise NetError(f"{v} lists a parent twice")
        object.__setattr__(self, "parents", parents)
        cpt = {}
        for v in variables:
            table = {tuple(k): Fraction(p) for k, p in self.cpt.get(v, {}).items()}
            for row in itertools.product((True, False), repeat=len(parents[v])):
                if row not in table:
                    pattern = " & ".join(literal_text(l) for l in zip(parents[v], row)) or "(no parents)"
                    raise NetError(f"missing CPT row for {v} | {pattern}")
                if not 0 <= table[row] <= 1:
                    raise NetError(f"CPT entry for {v} is {table[row]}, outside [0, 1]")
            if len(table) != 2 ** len(parents[v]):
                raise NetError(f"CPT for {v} has rows that match no parent assignment")
            cpt[v] = table
        object.__setattr__(self, "cpt", cpt)

    def __hash__(self):
        return hash(self.variables)

    def probability(self, assignment: Dict[str, bool]) -> Fraction:
        """Joint probability of a total assignment."""
        p = Fraction(1)
        for v in self.variables:
            row = tuple(assignment[q] for q in self.parents[v])
            t = self.cpt[v][row]
            p *= t if assignment[v] else 1 - t
        return p

    def vocabulary(self) -> Vocabulary:
        vocab = Vocabulary()
        for v in self.variables:
            vocab.declare_predicate(v, 1)
        return vocab


# ----------------------------------------------------------------------
# net files

def loads_net(text: str) -> BayesNet:
    sections = read_sections(text, {"var", "parents", "cpt"})
    if "var" not in sections:
        raise FormatError("net file needs a [var] section")
    variables: List[str] = []
    for _, line in sections["var"]:
        variables.extend(line.replace(",", " ").split())
    parents: Dict[str, Tuple[str, ...]] = {}
    for lineno, line in sections.get("parents", []):
        child, ps = _split_kv(line, lineno)
        if child in parents:
            raise FormatError(f"line {lineno}: parents of {child} given twice")
        parents[child] = tuple(ps.replace(",", " ").split())
    cpt: Dict[str, Dict[tuple, Fraction]] = {}
    for lineno, line in sections.get("cpt", []):
        lhs, value = _split_kv(line, lineno)
        head, _, given = lhs.partition("|")
        var = head.strip()
        ps = parents.get(var, ())
        try:
            lits = [parse_literal(t) for t in given.split("&")] if given.strip() else []
        except NetError as e:
            raise FormatError(f"line {lineno}: {e.message}") from None
        truth = dict(lits)
        if len(truth) != len(lits) or set(truth) != set(ps):
            raise FormatError(f"line {lineno}: CPT row for {var} must mention each parent {list(ps)} once")
        row = tuple(truth[p] for p in ps)
        table = cpt.setdefault(var, {})
        if row in table:
            raise FormatError(f"line {lineno}: duplicate CPT row")
        table[row] = _rational(value, lineno)
    try:
        return BayesNet(tuple(variables), parents, cpt)
    except NetError as e:
        raise FormatError(e.message) from None


def load_net(path) -> BayesNet:
    return loads_net(read_text(path))


def dumps_net(net: BayesNet) -> str:
    out = ["[var]", " ".join(net.variables), "[parents]"]
    out += [f"{v} = {' '.join(ps)}" for v, ps in net.parents.items() if ps]
    out.append("[cpt]")
    for v in net.variables:
        for row, p in net.cpt[v].items():
            given = " & ".join(literal_text(l) for l in zip(net.parents[v], row))
            lhs = f"{v} | {given}" if given else v
            out.append(f"{lhs} = {format_rational(p)}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------
# sentences

_X = Var("x")


def _atom(lit: Literal):
    a = Pred(lit[0], (_X,))
    return a if lit[1] else Not(a)


def _product(factors: Sequence):
    acc = factors[0]
    for f in factors[1:]:
        acc = BinOp("*", acc, f)
    return acc


def decomposition(net: BayesNet, signs: Optional[Sequence[bool]] = None):
    """``[L1 & ... & Ln]{x} = product of factors``, last variable's factor first."""
    signs = tuple(signs) if signs is not None else (True,) * len(net.variables)
    sign = dict(zip(net.variables, signs))
    lhs = ProbTerm(conj(_atom((v, sign[v])) for v in net.variables), ("x",))
    factors = []
    for v in reversed(net.variables):
        target = _atom((v, sign[v]))
        ps = net.parents[v]
        if ps:
            given = conj(_atom((p, sign[p])) for p in reversed(ps))
            factors.append(CondProb(target, given, ("x",)))
        else:
            factors.append(ProbTerm(target, ("x",)))
    return Equal(lhs, _product(factors))


def cpt_sentences(net: BayesNet) -> list:
    out = []
    for v in net.variables:
        ps = net.parents[v]
        for row, p in net.cpt[v].items():
            target = _atom((v, True))
            if ps:
                term = CondProb(target, conj(_atom(l) for l in zip(ps, row)), ("x",))
            else:
                term = ProbTerm(target, ("x",))
            out.append(Equal(term, Num(p)))
    return out


def net_to_lp(net: BayesNet) -> list:
    """The product decomposition (omitted for one variable) followed by the CPT sentences."""
    head = [decomposition(net)] if len(net.variables) > 1 else []
    return head + cpt_sentences(net)


# ----------------------------------------------------------------------
# joint

def individual_name(values: Sequence[bool]) -> str:
    return "w" + "".join("1" if b else "0" for b in values)


def build_joint(net: BayesNet) -> LpStructure:
    """One individual per assignment (all-true first); ``X_i`` holds where it is true."""
    n = len(net.variables)
    if n > MAX_VARIABLES:
        raise TooManyVariables(f"{n} variables exceed the limit of {MAX_VARIABLES}")
    domain, weights = [], {}
    extension: Dict[str, set] = {v: set() for v in net.variables}
    for values in itertools.product((True, False), repeat=n):
        name = individual_name(values)
        assignment = dict(zip(net.variables, values))
        domain.append(name)
        weights[name] = net.probability(assignment)
        for v, b in assignment.items():
            if b:
                extension[v].add((name,))
    return LpStructure(tuple(domain), weights, {v: frozenset(e) for v, e in extension.items()})


@dataclass
class SignedCheck:
    signs: Tuple[bool, ...]
    status: str                 # "holds", "fails" or "undefined"
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None

    @property
    def pattern(self) -> str:
        return "".join("+" if s else "-" for s in self.signs)


@dataclass
class NegationReport:
    checks: List[SignedCheck]

    @property
    def ok(self) -> bool:
        return all(c.status != "fails" for c in self.checks)

    def count(self, status: str) -> int:
        return sum(1 for c in self.checks if c.status == status)


def verify_negation_uniform(net: BayesNet, joint: Optional[LpStructure] = None) -> NegationReport:
    """Check every signed product decomposition on ``joint`` (default: the net's own joint)."""
    ev = Evaluator(joint if joint is not None else build_joint(net))
    checks = []
    for signs in itertools.product((True, False), repeat=len(net.variables)):
        eq = decomposition(net, signs)
        lhs = ev.term(desugar(eq.left), {})
        try:
            rhs = ev.term(desugar(eq.right), {})
        except DivisionByZero:
            checks.append(SignedCheck(signs, "undefined", lhs))
            continue
        checks.append(SignedCheck(signs, "holds" if lhs == rhs else "fails", lhs, rhs))
    return NegationReport(checks)


def query(net: BayesNet, target: Literal, evidence: Iterable[Literal] = ()) -> Fraction:
    """P(target | evidence) by summation over all assignments."""
    if isinstance(target, str):
        target = parse_literal(target)
    evidence = [parse_literal(e) if isinstance(e, str) else e for e in evidence]
    for name, _ in [target] + evidence:
        if name not in net.parents:
            raise NetError(f"unknown variable {name}")
    joint = Fraction(0)
    marginal = Fraction(0)
    for values in itertools.product((True, False), repeat=len(net.variables)):
        a = dict(zip(net.variables, values))
        if all(a[n] == s for n, s in evidence):
            p = net.probability(a)
            marginal += p
            if a[target[0]] == target[1]:
                joint += p
    if marginal == 0:
        shown = " & ".join(literal_text(e) for e in evidence)
        raise ZeroProbabilityEvidence(f"evidence {shown} has probability zero")
    return joint / marginal


def query_term(target: Literal, evidence: Sequence[Literal] = ()):
    """The probability term that :func:`query` computes."""
    body = _atom(target)
    if not evidence:
        return ProbTerm(body, ("x",))
    return CondProb(body, conj(_atom(e) for e in evidence), ("x",))
