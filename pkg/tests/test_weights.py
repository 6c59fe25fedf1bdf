import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pcdist.circuit import CircuitBuilder, check_decomposable, check_deterministic, evaluate
from pcdist.engine import wmc_exact
from pcdist.oracle import enumerate_models, exact_pmf
from pcdist.weights import DyadicWeightFn, WeightFn, chain_formula, dyadic_approx, weight_of, weighted_to_unweighted

from conftest import compiled_instances


def test_weight_of_examples():
    w = WeightFn([Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)])
    assert weight_of([1, 0, 1], w) == Fraction(1, 20)
    assert weight_of([1, 1, 1], WeightFn.uniform(3)) == Fraction(1, 8)


def test_weight_of_length_mismatch():
    with pytest.raises(ValueError):
        weight_of([1, 0], WeightFn.uniform(3))


def test_weightfn_validation():
    with pytest.raises(ValueError):
        WeightFn([Fraction(0)])
    with pytest.raises(ValueError):
        WeightFn([1])
    w = WeightFn.uniform(2)
    assert w.literal(-2) == Fraction(1, 2)
    assert w.replace(1, Fraction(1, 4))[1] == Fraction(1, 4)
    assert w[1] == Fraction(1, 2)  # replace returns a copy


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=1).filter(lambda p: 0 < p < 1), min_size=1, max_size=6))
def test_weights_sum_to_one_over_all_assignments(probs):
    w = WeightFn(probs)
    total = sum(weight_of(s, w) for s in itertools.product((0, 1), repeat=len(probs)))
    assert total == 1


def test_dyadic_examples():
    d = dyadic_approx(WeightFn([Fraction(1, 3)]), 4)
    assert d.numerators == (5,)
    assert d.to_weightfn()[1] == Fraction(5, 16)
    assert dyadic_approx(WeightFn([Fraction(1, 2)]), 1).numerators == (1,)


def test_dyadic_is_identity_on_dyadics():
    w = WeightFn([Fraction(3, 8), Fraction(1, 16), Fraction(15, 16)])
    d = dyadic_approx(w, 4)
    assert d.to_weightfn() == w
    assert d.max_rel_error == 0


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1).filter(lambda p: 0 < p < 1), st.integers(1, 20))
def test_dyadic_nearest_and_in_range(p, precision):
    d = dyadic_approx(WeightFn([p]), precision).numerators[0]
    top = 1 << precision
    assert 1 <= d <= top - 1
    # nearest admissible numerator (clamping only matters at the ends)
    best = min(range(max(1, d - 2), min(top - 1, d + 2) + 1), key=lambda k: abs(Fraction(k, top) - p))
    assert abs(Fraction(d, top) - p) == abs(Fraction(best, top) - p)


def test_dyadic_validation():
    with pytest.raises(ValueError):
        DyadicWeightFn((0,), 3)
    with pytest.raises(ValueError):
        DyadicWeightFn((8,), 3)


def test_chain_p1_d1():
    c = chain_formula(1, 1)
    assert enumerate_models(c) == [(1,)]


@pytest.mark.parametrize("p", range(1, 7))
def test_chain_counts_all_d(p):
    for d in range(1, 1 << p):
        for decision_form in (False, True):
            c = chain_formula(d, p, decision_form)
            assert len(enumerate_models(c)) == d
            assert check_decomposable(c)
            if decision_form:
                assert check_deterministic(c, "syntactic")
                assert check_deterministic(c, "semantic")


def test_chain_mentions_each_variable_at_most_once():
    for d in range(1, 64):
        c = chain_formula(d, 6)
        lits = [n.var for n in c.nodes if n.lit]
        assert len(lits) == len(set(lits))


def test_chain_rejects_bad_d():
    with pytest.raises(ValueError):
        chain_formula(0, 3)
    with pytest.raises(ValueError):
        chain_formula(8, 3)


def _project(models, n):
    out = {}
    for m in models:
        out[m[:n]] = out.get(m[:n], 0) + 1
    return out


def test_reduction_counts_and_projection():
    for cnf, c, w in compiled_instances(6, [3], seed=21, ratio=1.0, precision=3):
        for p in (1, 2, 3):
            d = dyadic_approx(w, p)
            dw = d.to_weightfn()
            for decision_form in (False, True):
                u = weighted_to_unweighted(c, d, decision_form)
                assert u.n_vars == 3 + 3 * p
                models = enumerate_models(u)
                assert len(models) == wmc_exact(c, dw) * (1 << (3 * p))
                counts = _project(models, 3)
                pmf = exact_pmf(c, dw)
                assert {k: Fraction(v, len(models)) for k, v in counts.items()} == pmf


def test_reduction_of_single_literal():
    b = CircuitBuilder(1)
    c = b.build(b.lit(1))
    u = weighted_to_unweighted(c, DyadicWeightFn((3,), 2))
    # x1 and a 2-variable chain with 3 models
    assert len(enumerate_models(u)) == 3
    assert all(m[0] == 1 for m in enumerate_models(u))
    assert all(evaluate(u, m) for m in enumerate_models(u))
