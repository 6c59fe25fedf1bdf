import itertools
import math
import random
from fractions import Fraction

import pytest

from pcdist.benchgen import compile_decision_dnnf, random_3cnf, random_weights
from pcdist.circuit import CircuitBuilder, Kind
from pcdist.weights import WeightFn, weight_of


def cnf_models(cnf):
    """Independent brute force: clause-by-clause evaluation of every assignment."""
    return [s for s in itertools.product((0, 1), repeat=cnf.n_vars) if cnf.evaluate(s)]


def brute_wmc(models, w):
    return sum((weight_of(s, w) for s in models), Fraction(0))


def compiled_instances(count, n_range, seed, ratio=3.0, precision=6, satisfiable=True):
    """Seeded compiled random 3-CNFs with random weights."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice(list(n_range))
        m = min(max(1, round(ratio * n)), 8 * math.comb(n, 3))
        cnf = random_3cnf(n, m, rng)
        circuit = compile_decision_dnnf(cnf)
        # the compiler folds constants, so an unsatisfiable formula compiles to a FALSE root
        if satisfiable and circuit.nodes[-1].kind == Kind.FALSE:
            continue
        out.append((cnf, circuit, random_weights(n, rng, precision)))
    return out


def valid_circuit(n):
    """Conjunction of (x_i or not x_i) over all variables: every assignment is a model."""
    b = CircuitBuilder(n)
    return b.build(b.conj([b.disj([b.lit(i), b.lit(-i)], decision=i) for i in range(1, n + 1)]))


@pytest.fixture
def rng():
    return random.Random(12345)
