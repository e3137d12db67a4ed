from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lplogic.core import Implies, Not, Pred, Var, conj
from lplogic.entail import (
    INFEASIBLE, BaseConstraint, Constraint, EntailmentProblem, Interval, OutsideFragment,
    TooManyAtoms, UndefinedQuery, bounds, build_lp, entail_lp_sentences,
)
from oracles import extreme_values
from strategies import monadic

x = Var("x")
P, Q = Pred("P", (x,)), Pred("Q", (x,))
loose = settings(max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))


def test_canonical_rows_for_two_atom_base():
    base = [BaseConstraint(P, Constraint("=", F(3, 5))),
            BaseConstraint(Implies(P, Q), Constraint("=", F(4, 5)))]
    lp = build_lp(EntailmentProblem(["P", "Q"], base, Q))
    assert lp.worlds == [(True, True), (True, False), (False, True), (False, False)]
    assert lp.rows == [([1, 1, 0, 0], "=", F(3, 5)), ([1, 0, 1, 1], "=", F(4, 5)), ([1, 1, 1, 1], "=", 1)]
    assert lp.objective == [1, 0, 1, 0]


def test_empty_base_has_only_normalization():
    lp = build_lp(EntailmentProblem(["P", "Q"], [], P))
    assert lp.rows == [([1, 1, 1, 1], "=", 1)]
    assert lp.objective == [1, 1, 0, 0]
    assert bounds(EntailmentProblem(["P"], [], P)) == Interval(0, 1)


def test_worked_example_bounds():
    iv = entail_lp_sentences(["[P(x)]{x} = 0.6", "[P(x) -> Q(x)]{x} = 0.8"], "[Q(x)]{x}")
    assert iv == Interval(F(2, 5), F(4, 5))
    assert str(iv) == "[2/5, 4/5]"


def test_joint_lower_bounds_both_marginals():
    base = ["[P(x) & Q(x)]{x} = 1/2"]
    assert entail_lp_sentences(base, "[P(x)]{x}") == Interval(F(1, 2), 1)
    assert entail_lp_sentences(base, "[Q(x)]{x}") == Interval(F(1, 2), 1)


def test_certain_atom():
    assert entail_lp_sentences(["[P(x)]{x} = 1"], "[P(x)]{x}") == Interval(1, 1)


def test_contradicting_complements():
    assert entail_lp_sentences(["[P(x)]{x} = 3/5", "[!P(x)]{x} = 3/5"], "[P(x)]{x}") is INFEASIBLE


def test_conjunction_of_constraints_in_one_sentence():
    iv = entail_lp_sentences(["[P(x)]{x} = 3/5 & [P(x) -> Q(x)]{x} = 4/5"], "[Q(x)]{x}")
    assert iv == Interval(F(2, 5), F(4, 5))


def test_strict_bound_gives_open_endpoint():
    iv = entail_lp_sentences(["[P(x)]{x} > 1/2"], "[P(x)]{x}")
    assert iv == Interval(F(1, 2), 1, lo_open=True)
    assert str(iv) == "(1/2, 1]"
    assert F(1, 2) not in iv and 1 in iv


def test_probability_term_on_the_right_is_flipped():
    assert entail_lp_sentences(["1/4 > [P(x)]{x}"], "[P(x)]{x}") == Interval(0, F(1, 4), hi_open=True)


def test_strict_contradiction():
    assert entail_lp_sentences(["[P(x)]{x} > 1/2", "[P(x)]{x} < 1/2"], "[P(x)]{x}") is INFEASIBLE
    assert entail_lp_sentences(["[P(x)]{x} >= 1/2", "[P(x)]{x} <= 1/2"], "[P(x)]{x}") == Interval(F(1, 2), F(1, 2))


def test_interval_constraint():
    iv = entail_lp_sentences(["[P(x)]{x} in [3/4, 99/100]"], "[!P(x)]{x}")
    assert iv == Interval(F(1, 100), F(1, 4))


def test_conditional_base_and_query():
    iv = entail_lp_sentences(["[Fly(x) | Bird(x)]{x} > 9/10"], "[Fly(x) | Bird(x)]{x}")
    assert iv == Interval(F(9, 10), 1, lo_open=True)
    assert entail_lp_sentences(["[Fly(x) | Bird(x)]{x} > 9/10"], "[Bird(x)]{x}") == \
        Interval(0, 1, lo_open=True)


def test_conditional_query_with_exact_data():
    iv = entail_lp_sentences(["[P(x) & Q(x)]{x} = 1/4", "[Q(x)]{x} = 1/2"], "[P(x) | Q(x)]{x}")
    assert iv == Interval(F(1, 2), F(1, 2))


def test_conditioning_event_forced_to_zero():
    with pytest.raises(UndefinedQuery):
        entail_lp_sentences(["[P(x)]{x} = 0"], "[Q(x) | P(x)]{x}")


def test_conditional_base_on_null_event_is_infeasible():
    assert entail_lp_sentences(["[B(x)]{x} = 0", "[F(x) | B(x)]{x} = 1/2"], "[F(x)]{x}") is INFEASIBLE


@pytest.mark.parametrize("sentence", [
    "[weight(x) > 1]{x} = 1/2",
    "[R(x, x)]{x} = 1/2",
    "[P(x) & Q(y)]{x,y} = 1/2",
    "[forall y. P(y)]{x} = 1",
    "[P(x)]{x} = [Q(x)]{x}",
    "P(c)",
    "[P(x)]{x} + 1 = 1/2",
])
def test_outside_fragment(sentence):
    from lplogic.parser import parse_vocabulary
    v = parse_vocabulary("measure weight/1; object const c;")
    with pytest.raises(OutsideFragment):
        entail_lp_sentences([sentence], "[P(x)]{x}", v)


def test_constraint_values_must_be_probabilities():
    with pytest.raises(ValueError):
        Constraint("=", F(3, 2))
    with pytest.raises(OutsideFragment):
        entail_lp_sentences(["[P(x)]{x} = 2"], "[P(x)]{x}")


def test_atom_limit():
    atoms = [Pred(f"A{i}", (x,)) for i in range(21)]
    with pytest.raises(TooManyAtoms):
        build_lp(EntailmentProblem([], [BaseConstraint(conj(atoms), Constraint("=", F(1, 2)))], atoms[0]))


def test_interval_validation_and_json():
    with pytest.raises(ValueError):
        Interval(F(1, 2), F(1, 3))
    assert Interval(0, 1).vacuous
    assert Interval(F(1, 3), 1, lo_open=True).as_dict() == {"lo": "1/3", "hi": "1", "lo_open": True, "hi_open": False}


def test_different_bound_variable_names_share_atoms():
    iv = entail_lp_sentences(["[P(y)]{y} = 3/5", "[P(z) -> Q(z)]{z} = 4/5"], "[Q(x)]{x}")
    assert iv == Interval(F(2, 5), F(4, 5))


# ----------------------------------------------------------------------
# properties against the vertex oracle

ATOMS = ("P", "Q", "R")
probs = st.fractions(min_value=0, max_value=1, max_denominator=6)


@st.composite
def problems(draw):
    k = draw(st.integers(1, 3))
    atoms = ATOMS[:k]
    base = []
    for _ in range(draw(st.integers(0, 3))):
        f = draw(monadic(atoms))
        op = draw(st.sampled_from(["=", ">=", "<="]))
        base.append((f, op, draw(probs)))
    return list(atoms), base, draw(monadic(atoms))


def _problem(atoms, base, query, given=None):
    return EntailmentProblem(list(atoms), [BaseConstraint(f, Constraint(op, v)) for f, op, v in base],
                             query, given)


@loose
@given(problems())
def test_bounds_match_vertex_enumeration(prob):
    atoms, base, query = prob
    expected = extreme_values(atoms, base, query)
    got = bounds(_problem(atoms, base, query))
    if expected is None:
        assert got is INFEASIBLE
    else:
        assert (got.lo, got.hi) == expected
        assert not (got.lo_open or got.hi_open)


@loose
@given(problems(), st.data())
def test_conditional_query_matches_vertices(prob, data):
    atoms, base, query = prob
    given_f = data.draw(monadic(tuple(atoms)))
    expected = extreme_values(atoms, base, query, given_f)
    try:
        got = bounds(_problem(atoms, base, query, given_f))
    except UndefinedQuery:
        assert expected == "undefined"
        return
    if expected is None:
        assert got is INFEASIBLE
    elif expected != "undefined":
        assert (got.lo, got.hi) == expected


@loose
@given(problems(), st.data())
def test_adding_a_constraint_never_widens(prob, data):
    atoms, base, query = prob
    before = bounds(_problem(atoms, base, query))
    extra = (data.draw(monadic(tuple(atoms))), data.draw(st.sampled_from(["=", ">=", "<="])), data.draw(probs))
    after = bounds(_problem(atoms, base + [extra], query))
    if before is INFEASIBLE:
        assert after is INFEASIBLE
    elif after is not INFEASIBLE:
        assert before.lo <= after.lo and after.hi <= before.hi


@loose
@given(st.integers(1, 3), st.data())
def test_negated_query_mirrors_interval(k, data):
    atoms = ATOMS[:k]
    f = data.draw(monadic(atoms))
    v = data.draw(probs)
    q = data.draw(monadic(atoms))
    a = bounds(_problem(atoms, [(f, "=", v)], q))
    b = bounds(_problem(atoms, [(f, "=", v)], Not(q)))
    if a is INFEASIBLE:
        assert b is INFEASIBLE
    else:
        assert (b.lo, b.hi) == (1 - a.hi, 1 - a.lo)
