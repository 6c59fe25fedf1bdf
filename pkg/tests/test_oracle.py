from fractions import Fraction

import pytest

from pcdist.circuit import CapabilityError, CircuitBuilder
from pcdist.engine import UnsatisfiableError
from pcdist.oracle import WeightTable, empirical_l1, enumerate_models, exact_pmf, tv_exact
from pcdist.weights import WeightFn, weight_of

from conftest import cnf_models, compiled_instances, valid_circuit


def test_enumerate_matches_cnf():
    for cnf, c, _ in compiled_instances(20, range(3, 13), seed=51, satisfiable=False):
        assert enumerate_models(c) == cnf_models(cnf)


def test_pmf_sums_to_one():
    for _, c, w in compiled_instances(10, range(3, 12), seed=52):
        assert sum(exact_pmf(c, w).values()) == 1


def test_weight_table_matches_weight_of():
    w = WeightFn([Fraction(1, 3), Fraction(2, 5), Fraction(1, 7)])
    t = WeightTable(w)
    from itertools import product

    for i, sigma in enumerate(product((0, 1), repeat=3)):
        assert Fraction(t[i], t.denom) == weight_of(sigma, w)


def test_tv_identical_is_zero():
    for _, c, w in compiled_instances(5, range(3, 10), seed=53):
        assert tv_exact(c, w, c, w) == 0


def test_tv_single_var_example():
    c = valid_circuit(1)
    assert tv_exact(c, WeightFn([Fraction(1, 3)]), c, WeightFn([Fraction(2, 3)])) == Fraction(1, 3)


def test_tv_disjoint_supports_is_one():
    b1, b2 = CircuitBuilder(1), CircuitBuilder(1)
    c1, c2 = b1.build(b1.lit(1)), b2.build(b2.lit(-1))
    assert tv_exact(c1, WeightFn.uniform(1), c2, WeightFn.uniform(1)) == 1


def test_tv_symmetric_and_bounded():
    inst = compiled_instances(6, [6], seed=54)
    for (_, c1, w1), (_, c2, w2) in zip(inst, inst[1:]):
        d = tv_exact(c1, w1, c2, w2)
        assert 0 <= d <= 1
        assert d == tv_exact(c2, w2, c1, w1)


def test_tv_matches_pmf_difference():
    inst = compiled_instances(6, [7], seed=55)
    for (_, c1, w1), (_, c2, w2) in zip(inst, inst[1:]):
        p, q = exact_pmf(c1, w1), exact_pmf(c2, w2)
        want = sum(abs(p.get(s, 0) - q.get(s, 0)) for s in p.keys() | q.keys()) / 2
        assert tv_exact(c1, w1, c2, w2) == want


def test_enumeration_guard():
    c = valid_circuit(25)
    with pytest.raises(CapabilityError):
        enumerate_models(c)


def test_unsat_pmf():
    b = CircuitBuilder(2)
    with pytest.raises(UnsatisfiableError):
        exact_pmf(b.build(b.false()), WeightFn.uniform(2))


def test_empirical_l1():
    pmf = {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}
    assert empirical_l1([(0,), (1,)], pmf) == 0
    assert empirical_l1([(0,), (0,)], pmf) == 1
