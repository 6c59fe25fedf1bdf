import random
from fractions import Fraction

import pytest

from pcdist.benchgen import (
    InfeasibleTarget,
    Target,
    compile_decision_dnnf,
    make_pair_with_target,
    perturb_one_var,
    random_3cnf,
    random_instance,
    random_weights,
)
from pcdist.circuit import CapabilityError, Kind, check_decomposable, check_deterministic
from pcdist.engine import wmc_exact
from pcdist.formats import CNF
from pcdist.oracle import enumerate_models, tv_exact
from pcdist.weights import WeightFn

from conftest import cnf_models, compiled_instances, valid_circuit


def test_random_3cnf_single_clause():
    cnf = random_3cnf(3, 1, random.Random(0))
    assert len(cnf.clauses) == 1
    assert sorted(abs(l) for l in cnf.clauses[0]) == [1, 2, 3]


def test_random_3cnf_reproducible_and_distinct():
    a = random_3cnf(14, 58, random.Random(1))
    assert a == random_3cnf(14, 58, random.Random(1))
    assert len({frozenset(c) for c in a.clauses}) == 58


def test_compile_empty_formula_is_valid():
    c = compile_decision_dnnf(CNF(2, ()))
    assert len(enumerate_models(c)) == 4


def test_compile_contradiction():
    c = compile_decision_dnnf(CNF(1, ((1,), (-1,))))
    assert c.nodes[-1].kind == Kind.FALSE
    assert wmc_exact(c, WeightFn.uniform(1)) == 0


def test_compile_limit():
    with pytest.raises(CapabilityError):
        compile_decision_dnnf(CNF(25, ()))


def test_compiled_output_properties():
    for cnf, c, _ in compiled_instances(20, range(6, 15), seed=71, satisfiable=False):
        assert check_decomposable(c)
        assert check_deterministic(c, "syntactic")
        assert wmc_exact(c, WeightFn.uniform(cnf.n_vars)) * 2**cnf.n_vars == len(cnf_models(cnf))


def test_satisfiable_rate_at_default_ratio():
    # expected: satisfiable in at least 80% of 50 seeds at ratio 58/14
    sat = 0
    for seed in range(50):
        cnf = random_3cnf(14, 58, random.Random(seed))
        sat += compile_decision_dnnf(cnf).nodes[-1].kind != Kind.FALSE
    assert sat >= 40


def test_random_weights():
    assert random_weights(5, random.Random(0), precision=1) == WeightFn.uniform(5)
    w = random_weights(20, random.Random(1), precision=8)
    assert all(0 < p < 1 and p.denominator <= 256 for p in w.probs)
    assert w == random_weights(20, random.Random(1), precision=8)


def test_random_instance_is_satisfiable():
    cnf, c, w = random_instance(12, random.Random(2))
    assert wmc_exact(c, w) > 0 and len(w) == 12


def test_perturb_valid_circuit_example():
    pair = perturb_one_var(valid_circuit(2), WeightFn.uniform(2), 1, Fraction(1, 4))
    assert pair.dtv_closed_form == Fraction(1, 4)
    assert tv_exact(pair.circuit, pair.w1, pair.circuit, pair.w2) == Fraction(1, 4)
    assert pair.w2[1] == Fraction(1, 4) and pair.w2[2] == Fraction(1, 2)


def test_perturb_orientation_either_direction():
    pair = perturb_one_var(valid_circuit(2), WeightFn.uniform(2), 1, Fraction(3, 4))
    assert pair.dtv_closed_form == Fraction(1, 4)


def test_perturb_rejects_same_weight():
    with pytest.raises(ValueError):
        perturb_one_var(valid_circuit(1), WeightFn.uniform(1), 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        perturb_one_var(valid_circuit(1), WeightFn.uniform(1), 1, 1)


def test_perturb_limit_goes_to_zero():
    _, c, w = compiled_instances(1, [10], seed=72)[0]
    d = [perturb_one_var(c, w, 2, w[2] + Fraction(1, 10**k) * (1 - w[2])).dtv_closed_form for k in (1, 3, 6)]
    assert d[0] >= d[1] >= d[2] and d[2] < Fraction(1, 10**4)


def test_closed_form_matches_oracle():
    rng = random.Random(3)
    for _, c, w in compiled_instances(15, range(5, 13), seed=73):
        v = rng.randint(1, c.n_vars)
        new = Fraction(rng.randint(1, 255), 256)
        if new == w[v]:
            continue
        pair = perturb_one_var(c, w, v, new)
        assert pair.dtv_closed_form == tv_exact(c, pair.w1, c, pair.w2)


def test_target_close_and_far():
    rng = random.Random(4)
    for _, c, w in compiled_instances(8, range(8, 13), seed=74):
        close = make_pair_with_target(c, w, Target("close", Fraction(1, 100)), rng)
        assert 0 < close.dtv_closed_form <= Fraction(1, 100)
        assert close.dtv_closed_form == tv_exact(c, close.w1, c, close.w2)
        try:
            far = make_pair_with_target(c, w, Target("far", Fraction(1, 5)), rng)
        except InfeasibleTarget:
            continue
        assert far.dtv_closed_form >= Fraction(1, 5)
        assert far.dtv_closed_form == tv_exact(c, far.w1, c, far.w2)


def test_target_infeasible():
    # one variable of a valid circuit can move the distribution by less than 1
    with pytest.raises(InfeasibleTarget):
        make_pair_with_target(valid_circuit(1), WeightFn.uniform(1), Target("far", Fraction(1)), random.Random(0))


def test_target_parse():
    assert Target.parse("far=0.2") == Target("far", Fraction(1, 5))
    with pytest.raises(ValueError):
        Target.parse("near=0.1")
