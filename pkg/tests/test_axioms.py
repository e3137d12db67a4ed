import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lplogic.axioms import (
    CHECKS, FormulaSampler, SamplerParams, axiom_suite, broken_measure, run_suite,
)
from lplogic.core import is_formula
from lplogic.model import RandomModelParams, generate_random
from lplogic.parser import parse
from lplogic.printer import pretty


def test_small_suite_passes():
    report = run_suite(seed=3, models=6, pairs=4)
    assert report.ok, report.failures[:3]
    assert report.models == 6 and report.pairs == 24
    assert all(report.tallies[c].passed > 0 for c in CHECKS)


def test_broken_measure_is_caught_by_additivity_and_normalization():
    report = run_suite(seed=3, models=6, pairs=4, inject_bug=True)
    assert not report.ok
    assert report.tallies["P1"].failed and report.tallies["P3"].failed
    assert any(line.startswith("P1\tFAIL") for line in report.lines())


def test_broken_measure_weights_exceed_one():
    _, s = generate_random(1, RandomModelParams(domain_size=3))
    assert sum(broken_measure(s).weights.values()) > 1
    assert sum(s.weights.values()) == 1


def test_same_seed_same_report():
    a = run_suite(seed=9, models=4, pairs=3).lines()
    b = run_suite(seed=9, models=4, pairs=3).lines()
    assert a == b
    assert a != run_suite(seed=10, models=4, pairs=3).lines()


def test_sampled_formulas_parse_back():
    vocab, _ = generate_random(0, RandomModelParams(predicates={"P": 1, "Q": 1, "R": 2}, constants=1))
    sampler = FormulaSampler(vocab, random.Random(5))
    for _ in range(50):
        f = sampler.formula(["x", "y"])
        assert is_formula(f)
        assert parse(pretty(f), vocab) == f


@settings(max_examples=25, deadline=None, suppress_health_check=list(HealthCheck))
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_suite_holds_on_any_generated_model(seed, size):
    params = RandomModelParams(domain_size=size, predicates={"P": 1, "Q": 1, "R": 2}, constants=1)
    vocab, s = generate_random(seed, params)
    report = axiom_suite(s, vocab, SamplerParams(pairs=2, seed=seed))
    assert report.ok, report.failures[:3]
