from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lplogic import model
from lplogic.core import And, BinOp, Const, Geq, Not, Num, Pred, ProbTerm, Var
from lplogic.evaluate import (
    Assignment, DivisionByZero, EnumerationCapExceeded, Evaluator, FieldQuantifierUnsupported,
    UnboundVariable, eval_formula, eval_term, test_points as partition_points,
)
from lplogic.model import generate_random
from lplogic.parser import parse, parse_vocabulary

EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "lplogic" / "paper-examples"
TWEETY_VOCAB, TWEETY = model.load(EXAMPLES / "tweety.model")


def value(text, struct=TWEETY, vocab=TWEETY_VOCAB, **kw):
    node = parse(text, vocab)
    return eval_term(struct, {}, node, **kw)


def truth(text, struct=TWEETY, vocab=TWEETY_VOCAB, sigma=None):
    return eval_formula(struct, sigma, parse(text, vocab))


def test_hand_counted_conditional():
    # birds a b c d weigh 1/10 + 1/5 + 3/10 + 1/10; the flying ones a b c weigh 6/10
    assert value("[Bird(x)]{x}") == Fraction(7, 10)
    assert value("[Fly(x) & Bird(x)]{x}") == Fraction(3, 5)
    assert value("[Fly(x) | Bird(x)]{x}") == Fraction(6, 7)


def test_two_variable_term_uses_product_weights():
    # pairs (u, v) with u a bird and v not: (1/10+1/5+3/10+1/10) * 3/10
    assert value("[Bird(x) & !Bird(y)]{x,y}") == Fraction(7, 10) * Fraction(3, 10)


def test_ground_sentences():
    assert truth("Bird(Tweety) & !Fly(Tweety)")
    assert not truth("Fly(Tweety)")
    assert truth("exists x. Fly(x) & !Bird(x)")
    assert not truth("forall x. Bird(x) -> Fly(x)")


def test_closed_formula_probability_is_zero_or_one():
    assert value("[exists y. Fly(y) & !Bird(y)]{x}") == 1
    assert value("[forall y. Fly(y)]{x}") == 0


def test_free_variable_assignment():
    f = parse("Bird(x) & [Fly(y) & y = x]{y} > 0", TWEETY_VOCAB)
    assert eval_formula(TWEETY, {"x": "a"}, f)
    assert not eval_formula(TWEETY, Assignment(x="d"), f)
    with pytest.raises(UnboundVariable):
        eval_formula(TWEETY, {}, f)


def test_conditional_on_empty_set():
    with pytest.raises(DivisionByZero):
        value("[Fly(x) | Penguin(x)]{x}")


def test_false_conjunct_absorbs_undefined_either_side():
    undefined = "[Fly(x) | Penguin(x)]{x} > 1/2"
    assert truth(f"[Penguin(x)]{{x}} > 0 & {undefined}") is False
    assert truth(f"{undefined} & [Penguin(x)]{{x}} > 0") is False
    assert truth(f"[Penguin(x)]{{x}} > 0 -> {undefined}") is True
    with pytest.raises(DivisionByZero):
        truth(f"[Bird(x)]{{x}} > 0 & {undefined}")


def test_arithmetic_and_constants():
    vocab, s = model.loads("""
[vocabulary]
object pred P/1;
field const k;
object const c;
measure weight/1;
[domain]
a b
[predicates]
P = a
[constants]
k = 3/2
c = a
[measuring]
weight(a) = 2
weight(b) = 5
""")
    assert value("k * [P(x)]{x} + 1", s, vocab) == Fraction(7, 4)
    assert value("weight(c) / 4 - k", s, vocab) == -1
    assert truth("forall x. weight(x) >= 2", s, vocab)
    with pytest.raises(DivisionByZero):
        value("1 / ([P(x)]{x} - 1/2)", s, vocab)


BIRDS = """
[vocabulary]
object pred fly/1, bird/1;
measure weight/1;
[domain]
a b c d
[predicates]
bird = a b c
fly = {flyers}
[measuring]
weight(a) = 1
weight(b) = 2
weight(c) = 3
weight(d) = 9
"""
GUARDED = ("forall y:field. [bird(x) & weight(x) < y]{x} > 0 & [bird(x) & weight(x) > y]{x} > 0"
           " -> [fly(x) | bird(x) & weight(x) < y]{x} > [fly(x) | bird(x) & weight(x) > y]{x}")
UNGUARDED = "forall y:field. [fly(x) | bird(x) & weight(x) < y]{x} > [fly(x) | bird(x) & weight(x) > y]{x}"


def test_field_quantifier_decreasing_proportion():
    vocab, light_fly = model.loads(BIRDS.format(flyers="a b"))
    assert truth(GUARDED, light_fly, vocab)
    vocab, heavy_fly = model.loads(BIRDS.format(flyers="b c"))
    assert not truth(GUARDED, heavy_fly, vocab)


def test_unguarded_field_sentence_is_undefined_below_lightest_bird():
    vocab, s = model.loads(BIRDS.format(flyers="a b"))
    with pytest.raises(DivisionByZero):
        truth(UNGUARDED, s, vocab)


def test_field_quantifier_over_constant_comparison():
    vocab = parse_vocabulary("object pred P/1;")
    _, s = generate_random(1)
    assert eval_formula(s, {}, parse("forall y:field. y >= 1/2 | y < 1/2", vocab))
    assert not eval_formula(s, {}, parse("forall y:field. y >= 1/2", vocab))
    assert eval_formula(s, {}, parse("exists y:field. y > 1/3 & 1/2 > y", vocab))


def test_field_variable_in_arithmetic_is_unsupported():
    _, s = generate_random(1)
    with pytest.raises(FieldQuantifierUnsupported):
        eval_formula(s, {}, parse("forall y:field. y * y >= 0"))


def test_partition_points_cover_every_cell():
    pts = partition_points([Fraction(1), Fraction(3)])
    assert pts == [0, 1, 2, 3, 4]
    assert partition_points([]) == [0]


def test_enumeration_cap():
    _, s = generate_random(2)
    node = parse("[R(x, y)]{x,y}", parse_vocabulary("object pred R/2;"))
    with pytest.raises(EnumerationCapExceeded):
        eval_term(s, {}, node, max_enum=len(s.domain) ** 2 - 1)
    assert eval_term(s, {}, node, max_enum=len(s.domain) ** 2) >= 0


def test_evaluator_cache_is_consistent():
    ev = Evaluator(TWEETY)
    t = ProbTerm(Pred("Bird", (Var("x"),)), ("x",))
    assert ev.term(t, {}) == ev.term(t, {}) == Fraction(7, 10)


fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
_, ANY = generate_random(0)


def _ev(t):
    return eval_term(ANY, {}, t)


@settings(max_examples=200, deadline=None)
@given(fractions, fractions, fractions)
def test_field_axioms(a, b, c):
    A, B, C = Num(a), Num(b), Num(c)
    add = lambda p, q: BinOp("+", p, q)  # noqa: E731
    mul = lambda p, q: BinOp("*", p, q)  # noqa: E731
    assert _ev(add(A, B)) == _ev(add(B, A))
    assert _ev(mul(A, B)) == _ev(mul(B, A))
    assert _ev(add(add(A, B), C)) == _ev(add(A, add(B, C)))
    assert _ev(mul(mul(A, B), C)) == _ev(mul(A, mul(B, C)))
    assert _ev(mul(A, add(B, C))) == _ev(add(mul(A, B), mul(A, C)))
    assert _ev(BinOp("-", A, A)) == 0
    if a != 0:
        assert _ev(BinOp("/", A, A)) == 1
    ge = eval_formula(ANY, {}, Geq(A, B))
    le = eval_formula(ANY, {}, Geq(B, A))
    assert ge or le
    if ge and eval_formula(ANY, {}, Geq(B, C)):
        assert eval_formula(ANY, {}, Geq(A, C))
    if ge:
        assert eval_formula(ANY, {}, Geq(add(A, C), add(B, C)))


@settings(max_examples=150, deadline=None, suppress_health_check=list(HealthCheck))
@given(st.integers(0, 10 ** 6))
def test_conjunction_order_does_not_matter(seed):
    vocab, s = generate_random(seed, model.RandomModelParams(domain_size=3))
    a = parse("[P(x) | Q(x)]{x} >= 1/2", vocab)
    b = parse("[R(x, x)]{x} >= 1/3", vocab)

    def outcome(f):
        try:
            return eval_formula(s, {}, f)
        except DivisionByZero:
            return "undefined"

    assert outcome(And(a, b)) == outcome(And(b, a))
    assert outcome(Not(And(a, b))) == outcome(Not(And(b, a)))
