"""Degrees of belief in ground sentences from statistical knowledge.

Everything the knowledge base states about an individual (its ground
literals, looked up, not derived) becomes the reference class. The
individual is replaced by a fresh variable and the resulting conditional
probability term is bounded by entailment from the statistical sentences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from lplogic.core import (
    OBJECT, And, CondProb, Const, LpError, Not, Pred, ProbTerm, Var, Vocabulary, conj,
    constants_in, is_closed, names_in, fresh_name, substitute, walk,
)
from lplogic.entail import (
    INFEASIBLE, EntailmentProblem, Interval, bounds, sentence_constraints,
)
from lplogic.model import read_text
from lplogic.parser import parse, parse_document
from lplogic.printer import pretty


class NoReferenceClass(LpError):
    pass


class NoGroundFacts(NoReferenceClass):
    pass


class VacuousBelief(UserWarning):
    pass


def _is_literal(f) -> bool:
    if isinstance(f, Not):
        f = f.body
    return isinstance(f, Pred) and all(isinstance(a, Const) for a in f.args)


def _has_probability(f) -> bool:
    return any(isinstance(n, (ProbTerm, CondProb)) for n in walk(f))


@dataclass
class KnowledgeBase:
    vocab: Vocabulary
    statistical: List = field(default_factory=list)
    facts: List = field(default_factory=list)

    @classmethod
    def from_sentences(cls, vocab: Vocabulary, sentences: Sequence) -> "KnowledgeBase":
        """Sort sentences into statistics and ground literals; a ground conjunction is split."""
        kb = cls(vocab)
        for s in sentences:
            kb.add(s)
        return kb

    def add(self, sentence) -> None:
        if _has_probability(sentence):
            sentence_constraints(sentence)          # raises if outside the fragment
            self.statistical.append(sentence)
            return
        parts = _conjuncts(sentence)
        for p in parts:
            if not _is_literal(p):
                raise LpError(f"{pretty(p)} is neither a statistical sentence nor a ground literal"
                              " (undeclared names are read as variables; declare constants with 'object const')",
                              getattr(p, "span", None))
        self.facts.extend(parts)


def _conjuncts(f) -> list:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def loads_kb(text: str, vocab: Optional[Vocabulary] = None) -> KnowledgeBase:
    vocab, nodes = parse_document(text, vocab, implicit=True)
    return KnowledgeBase.from_sentences(vocab, nodes)


def load_kb(path, vocab: Optional[Vocabulary] = None) -> KnowledgeBase:
    return loads_kb(read_text(path), vocab)


def known_about(kb: KnowledgeBase, c: str):
    """Conjunction, in knowledge-base order, of the ground literals mentioning ``c``."""
    if kb.vocab.constants.get(c) is not OBJECT:
        raise NoGroundFacts(f"{c} is not a declared object constant")
    facts = [f for f in kb.facts if Const(c) in constants_in(f)]
    if not facts:
        raise NoGroundFacts(f"the knowledge base states nothing about {c}")
    return conj(facts)


@dataclass
class BeliefResult:
    interval: object                      # Interval or INFEASIBLE
    term: object                          # the generalized probability term
    reference_class: object               # conditioning formula over the fresh variable
    provenance: List = field(default_factory=list)
    vacuous: bool = False
    reference_class_not_matched: bool = False

    @property
    def infeasible(self) -> bool:
        return self.interval is INFEASIBLE

    def as_dict(self) -> dict:
        return {
            "interval": None if self.infeasible else self.interval.as_dict(),
            "infeasible": self.infeasible,
            "term": pretty(self.term),
            "reference_class": pretty(self.reference_class),
            "provenance": [pretty(s) for s in self.provenance],
            "vacuous": self.vacuous,
            "reference_class_not_matched": self.reference_class_not_matched,
        }


def _target_constant(target) -> str:
    if not _is_literal(target) or not is_closed(target):
        raise LpError(f"belief target {pretty(target)} must be a ground literal", getattr(target, "span", None))
    cs = constants_in(target)
    if len(cs) != 1:
        raise LpError(f"belief target {pretty(target)} must mention exactly one constant")
    return cs[0].name


def believe(kb: KnowledgeBase, target, constant: Optional[str] = None) -> BeliefResult:
    """Bound ``[target(x) | known_about(x)]{x}`` by the knowledge base's statistics."""
    if isinstance(target, str):
        target = parse(target, kb.vocab)
    c = constant or _target_constant(target)
    evidence = known_about(kb, c)
    avoid = names_in(target) | names_in(evidence) | set(kb.vocab.constants) | set(kb.vocab.predicates)
    x = "x" if "x" not in avoid else fresh_name("x", avoid)
    gen = {Const(c): Var(x)}
    body, given = substitute(target, gen), substitute(evidence, gen)
    term = CondProb(body, given, (x,))

    base, provenance = [], []
    preds = {n.name for n in walk(term) if isinstance(n, Pred)}
    for s in kb.statistical:
        base.extend(sentence_constraints(s))
        if preds & {n.name for n in walk(s) if isinstance(n, Pred)}:
            provenance.append(s)
    interval = bounds(EntailmentProblem([], base, body, given))

    probe = Var("_m")
    want = (substitute(body, {Var(x): probe}), substitute(given, {Var(x): probe}))
    matched = False
    for b in base:
        v = next((n.name for n in walk(b.formula) if isinstance(n, Var)), None)
        if v is None or b.given is None:
            continue
        if (substitute(b.formula, {Var(v): probe}), substitute(b.given, {Var(v): probe})) == want:
            matched = True
    result = BeliefResult(interval, term, given, provenance,
                          vacuous=isinstance(interval, Interval) and interval.vacuous,
                          reference_class_not_matched=not matched)
    if result.vacuous:
        warnings.warn(f"no nontrivial bound on {pretty(term)}: the statistics do not constrain "
                      "this reference class", VacuousBelief, stacklevel=2)
    return result
