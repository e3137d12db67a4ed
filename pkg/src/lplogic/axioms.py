"""Executable checks of the probability-term axioms on concrete structures.

Each check evaluates both sides of a law on a structure and compares the
exact rationals. A law whose side is undefined (a conditional on a null
set) is recorded as ``undefined`` rather than as a failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from lplogic.core import (
    OBJECT, And, CondProb, Const, Equal, Exists, Forall, Geq, Implies, Not,
    Num, Or, Pred, ProbTerm, Var, Vocabulary, desugar, free_vars,
)
from lplogic.evaluate import Evaluator
from lplogic.model import LpStructure, RandomModelParams, generate_random
from lplogic.printer import pretty

CHECKS = (
    "P1", "P2", "P3", "P4", "P5",
    "lemma1a", "lemma1b", "bayes",
    "tautology", "permutation", "zero_one", "monotone",
)


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    undefined: int = 0


@dataclass
class SuiteReport:
    tallies: dict = field(default_factory=lambda: {c: CheckTally() for c in CHECKS})
    failures: List[str] = field(default_factory=list)
    models: int = 0
    pairs: int = 0

    @property
    def ok(self) -> bool:
        return not any(t.failed for t in self.tallies.values())

    def record(self, check: str, outcome: Optional[bool], detail: str = "") -> None:
        tally = self.tallies[check]
        if outcome is None:
            tally.undefined += 1
        elif outcome:
            tally.passed += 1
        else:
            tally.failed += 1
            self.failures.append(f"{check}: {detail}")

    def merge(self, other: "SuiteReport") -> None:
        for name, t in other.tallies.items():
            mine = self.tallies[name]
            mine.passed += t.passed
            mine.failed += t.failed
            mine.undefined += t.undefined
        self.failures.extend(other.failures)
        self.models += other.models
        self.pairs += other.pairs

    def lines(self) -> List[str]:
        out = [f"models\t{self.models}", f"pairs\t{self.pairs}"]
        for name in CHECKS:
            t = self.tallies[name]
            status = "FAIL" if t.failed else "ok"
            out.append(f"{name}\t{status}\tpassed={t.passed}\tfailed={t.failed}\tundefined={t.undefined}")
        out.extend(f"failure\t{f}" for f in self.failures[:50])
        return out


@dataclass
class SamplerParams:
    pairs: int = 20
    seed: int = 0
    depth: int = 2


class FormulaSampler:
    """Random formulas over a vocabulary's object predicates and constants."""

    def __init__(self, vocab: Vocabulary, rng: random.Random, depth: int = 2):
        self.vocab = vocab
        self.rng = rng
        self.depth = depth
        self.preds = [(n, len(s)) for n, s in vocab.predicates.items()
                      if all(x is OBJECT for x in s)]
        self.consts = [Const(c) for c, s in vocab.constants.items() if s is OBJECT]
        self._fresh = 0

    def fresh(self, stem: str = "z") -> str:
        self._fresh += 1
        return f"{stem}{self._fresh}"

    def term(self, scope: Sequence[str]):
        pool = [Var(v) for v in scope] + self.consts
        return self.rng.choice(pool)

    def atom(self, scope):
        rng = self.rng
        if (not self.preds or rng.random() < 0.15) and scope:
            return Equal(self.term(scope), self.term(scope))
        name, arity = rng.choice(self.preds)
        return Pred(name, tuple(self.term(scope) for _ in range(arity)))

    def formula(self, scope: Sequence[str], depth: Optional[int] = None):
        depth = self.depth if depth is None else depth
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            return self.atom(scope)
        kind = rng.choice(("not", "and", "or", "implies", "forall", "exists", "prob"))
        sub = lambda s=scope: self.formula(s, depth - 1)  # noqa: E731
        if kind == "not":
            return Not(sub())
        if kind == "and":
            return And(sub(), sub())
        if kind == "or":
            return Or(sub(), sub())
        if kind == "implies":
            return Implies(sub(), sub())
        if kind in ("forall", "exists"):
            v = self.fresh()
            cls = Forall if kind == "forall" else Exists
            return cls(Var(v), sub(list(scope) + [v]))
        v = self.fresh("w")
        threshold = Num(Fraction(rng.randint(0, 4), 4))
        return Geq(ProbTerm(sub(list(scope) + [v]), (v,)), threshold)


def _prob(ev: Evaluator, body, names) -> Fraction:
    return ev.term(ProbTerm(desugar(body), tuple(names)), {})


def _closure(phi, names):
    for n in reversed(names):
        phi = Forall(Var(n), phi)
    return phi


def check_pair(ev: Evaluator, report: SuiteReport, alpha, beta, vec: tuple,
               gamma=None, spare: str = "u") -> None:
    """Run every law on one pair of formulas whose free variables lie in ``vec``."""
    P = lambda f, names=vec: _prob(ev, f, names)  # noqa: E731
    show = lambda: f"alpha={pretty(alpha)}; beta={pretty(beta)}; vec={vec}"  # noqa: E731
    a, b = P(alpha), P(beta)
    na = P(Not(alpha))
    a_or_b, a_and_b = P(Or(alpha, beta)), P(And(alpha, beta))

    # P1, also on a tautology so the antecedent is exercised
    for f in (alpha, Or(alpha, Not(alpha))):
        if ev.formula(desugar(_closure(f, vec)), {}):
            report.record("P1", P(f) == 1, show())
        else:
            report.record("P1", None)
    report.record("P2", a >= 0 and b >= 0, show())
    report.record("P3", a + na == 1, show())
    report.record("P4", a + b >= a_or_b, show())
    for x, y in ((alpha, beta), (alpha, And(Not(alpha), beta))):
        if P(And(x, y)) == 0:
            report.record("P5", P(x) + P(y) == P(Or(x, y)), show())
        else:
            report.record("P5", None)
    for x, y in ((alpha, beta), (alpha, Not(Not(alpha))), (alpha, And(alpha, Or(beta, Not(beta))))):
        if P(Implies(x, y)) == 1 and P(Implies(y, x)) == 1:
            report.record("lemma1a", P(x) == P(y), show())
        else:
            report.record("lemma1a", None)
    report.record("lemma1b", a_or_b == a + b - a_and_b, show())
    if a == 0 or b == 0:
        report.record("bayes", None)
    else:
        b_given_a = ev.term(desugar(CondProb(beta, alpha, vec)), {})
        a_given_b = ev.term(desugar(CondProb(alpha, beta, vec)), {})
        report.record("bayes", b_given_a == a_given_b * b / a, show())
    report.record("monotone", a_and_b <= a and a <= a_or_b, show())

    # the spare variable must not occur in alpha
    if gamma is not None:
        taut = And(alpha, Or(gamma, Not(gamma)))
        report.record("tautology", P(taut, vec + (spare,)) == a, show())
    report.record("permutation", P(alpha, tuple(reversed(vec))) == a
                  and P(alpha, (spare,) + vec) == P(alpha, vec + (spare,)) == a, show())

    closed = _closure(alpha, vec)
    closed_exists = Exists(Var(vec[0]), _closure(alpha, vec[1:])) if vec else closed
    for c in (closed, closed_exists):
        value = P(c)
        report.record("zero_one", value in (0, 1) and value == (1 if ev.formula(desugar(c), {}) else 0), show())


def axiom_suite(struct: LpStructure, vocab: Vocabulary,
                params: Optional[SamplerParams] = None) -> SuiteReport:
    """Check every law over ``params.pairs`` random formula pairs on ``struct``."""
    params = params or SamplerParams()
    rng = random.Random(params.seed)
    sampler = FormulaSampler(vocab, rng, params.depth)
    ev = Evaluator(struct)
    report = SuiteReport(models=1)
    for _ in range(params.pairs):
        vec = ("x",) if rng.random() < 0.5 else ("x", "y")
        alpha = sampler.formula(vec)
        beta = sampler.formula(vec)
        gamma = sampler.formula(vec + ("u",), 1)
        assert {n for n, _ in free_vars(alpha)} <= set(vec)
        report.pairs += 1
        check_pair(ev, report, alpha, beta, vec, gamma)
    return report


def run_suite(seed: int = 0, models: int = 100, sizes: Sequence[int] = (1, 2, 3, 4, 5, 6),
              pairs: int = 20, inject_bug: bool = False) -> SuiteReport:
    """The suite over ``models`` generated structures cycling through ``sizes``."""
    total = SuiteReport(models=0)
    for i in range(models):
        size = sizes[i % len(sizes)]
        style = "uniform" if i % 3 == 0 else "random"
        params = RandomModelParams(domain_size=size, weights=style,
                                   predicates={"P": 1, "Q": 1, "R": 2}, constants=1)
        vocab, struct = generate_random(seed * 100_003 + i, params)
        if inject_bug:
            struct = broken_measure(struct)
        total.merge(axiom_suite(struct, vocab, SamplerParams(pairs=pairs, seed=seed * 7919 + i)))
    return total


def broken_measure(struct: LpStructure) -> LpStructure:
    """Copy of ``struct`` whose base weights sum to more than 1 (negative control)."""
    bad = dict(struct.weights)
    first = struct.domain[0]
    bad[first] = bad[first] + Fraction(1, 10)
    clone = LpStructure(struct.domain, struct.weights, struct.predicates, struct.functions,
                        struct.constants, struct.field_constants, struct.measuring,
                        struct.field_functions)
    object.__setattr__(clone, "weights", bad)
    return clone
