"""Benchmark generation: random 3-CNFs, an exhaustive decision-DNNF compiler,
random dyadic weights and one-variable perturbation pairs whose total
variation distance is known in closed form."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .circuit import CapabilityError, Circuit, CircuitBuilder
from .engine import UnsatisfiableError, wmc_conditioned, wmc_exact
from .formats import CNF
from .weights import WeightFn

__all__ = [
    "COMPILE_LIMIT",
    "DEFAULT_RATIO",
    "PerturbedPair",
    "Target",
    "InfeasibleTarget",
    "random_3cnf",
    "compile_decision_dnnf",
    "random_weights",
    "random_instance",
    "perturb_one_var",
    "make_pair_with_target",
]

COMPILE_LIMIT = 24
DEFAULT_RATIO = 4.1


def random_3cnf(n: int, m: int, rng: random.Random) -> CNF:
    """``m`` distinct clauses, each over 3 distinct uniformly chosen variables with uniform signs."""
    if n < 3:
        raise ValueError("need at least 3 variables")
    available = 8 * (n * (n - 1) * (n - 2) // 6)
    if m > available:
        raise ValueError(f"only {available} distinct 3-clauses exist over {n} variables, asked for {m}")
    seen: set[frozenset[int]] = set()
    clauses = []
    while len(clauses) < m:
        vs = rng.sample(range(1, n + 1), 3)
        clause = tuple(v if rng.getrandbits(1) else -v for v in sorted(vs))
        key = frozenset(clause)
        if key in seen:
            continue
        seen.add(key)
        clauses.append(clause)
    return CNF(n, tuple(clauses))


Clauses = frozenset  # frozenset of frozenset[int]


def _condition(clauses: Clauses, lit: int) -> Clauses | None:
    """Clauses after setting ``lit`` true; None on an empty clause."""
    out = set()
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.add(c)
    return frozenset(out)


def _unit_propagate(clauses: Clauses) -> tuple[Clauses | None, list[int]]:
    units: list[int] = []
    while True:
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            return clauses, units
        (lit,) = unit
        units.append(lit)
        clauses = _condition(clauses, lit)
        if clauses is None:
            return None, units


def _components(clauses: Clauses) -> list[Clauses]:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in clauses:
        vs = [abs(l) for l in c]
        root = find(vs[0])
        for v in vs[1:]:
            parent[find(v)] = root
    groups: dict[int, set] = {}
    for c in clauses:
        groups.setdefault(find(abs(next(iter(c)))), set()).add(c)
    return [frozenset(g) for g in groups.values()]


def compile_decision_dnnf(cnf: CNF, limit: int = COMPILE_LIMIT) -> Circuit:
    """Exhaustive DPLL compilation into decision-DNNF.

    Unit literals are conjoined in front of the residual formula, independent
    clause groups become decomposable AND nodes, and branching on ``x``
    produces ``(x and F|x) or (not x and F|not x)`` with decision variable
    ``x``. Residual formulas are cached, so equal subproblems share a node.
    Variables that drop out of every clause are left unmentioned.
    """
    if cnf.n_vars > limit:
        raise CapabilityError(f"compiler limited to {limit} variables (got {cnf.n_vars})")
    b = CircuitBuilder(cnf.n_vars)
    cache: dict[Clauses, int] = {}

    def compile_(clauses: Clauses) -> int:
        hit = cache.get(clauses)
        if hit is not None:
            return hit
        residual, units = _unit_propagate(clauses)
        if residual is None:
            node = b.false()
        elif units:
            node = b.conj([b.lit(l) for l in units] + [compile_(residual)])
        elif not residual:
            node = b.true()
        else:
            parts = _components(residual)
            if len(parts) > 1:
                node = b.conj([compile_(p) for p in parts])
            else:
                counts = Counter(abs(l) for c in residual for l in c)
                x = max(sorted(counts), key=counts.__getitem__)
                branches = []
                for lit in (x, -x):
                    sub = _condition(residual, lit)
                    rest = b.false() if sub is None else compile_(sub)
                    branches.append(b.conj([b.lit(lit), rest]))
                node = b.disj(branches, decision=x)
        cache[clauses] = node
        return node

    start = frozenset(frozenset(c) for c in cnf.clauses)
    if any(not c for c in start):
        return b.build(b.false())
    return b.build(compile_(start))


def random_weights(n: int, rng: random.Random, precision: int = 8) -> WeightFn:
    """Each weight uniform over ``{1, ..., 2**precision - 1} / 2**precision``."""
    if precision < 1:
        raise ValueError("precision must be at least 1")
    top = 1 << precision
    return WeightFn(Fraction(rng.randint(1, top - 1), top) for _ in range(n))


def random_instance(
    n: int,
    rng: random.Random,
    ratio: float = DEFAULT_RATIO,
    precision: int = 8,
    max_tries: int = 100,
) -> tuple[CNF, Circuit, WeightFn]:
    """A satisfiable compiled random 3-CNF with random weights; unsatisfiable draws are regenerated."""
    m = round(ratio * n)
    for _ in range(max_tries):
        cnf = random_3cnf(n, m, rng)
        circuit = compile_decision_dnnf(cnf)
        if wmc_exact(circuit, WeightFn.uniform(n)) > 0:
            return cnf, circuit, random_weights(n, rng, precision)
    raise UnsatisfiableError(f"no satisfiable instance in {max_tries} tries (n={n}, m={m})")


@dataclass(frozen=True)
class PerturbedPair:
    circuit: Circuit
    w1: WeightFn
    w2: WeightFn
    var: int
    dtv_closed_form: Fraction


def _closed_form(circuit: Circuit, w1: WeightFn, w2: WeightFn, v: int) -> Fraction:
    # orient so that the first function puts more weight on v
    if w1[v] < w2[v]:
        w1, w2 = w2, w1
    marginal = wmc_conditioned(circuit, w1, v)
    return marginal * (w1[v] / wmc_exact(circuit, w1) - w2[v] / wmc_exact(circuit, w2))


def perturb_one_var(circuit: Circuit, w1: WeightFn, v: int, new_weight) -> PerturbedPair:
    """Pair ``(w1, w2)`` differing only at ``v``, with their exact distance from three weighted counts."""
    new_weight = Fraction(new_weight)
    if not 1 <= v <= circuit.n_vars:
        raise ValueError(f"variable {v} outside 1..{circuit.n_vars}")
    if not 0 < new_weight < 1:
        raise ValueError(f"new weight {new_weight} not in (0,1)")
    if new_weight == w1[v]:
        raise ValueError("new weight equals the current weight; the pair would be identical")
    if wmc_exact(circuit, w1) == 0:
        raise UnsatisfiableError("circuit is unsatisfiable")
    w2 = w1.replace(v, new_weight)
    return PerturbedPair(circuit, w1, w2, v, _closed_form(circuit, w1, w2, v))


class Target(NamedTuple):
    """``Target("close", eps)`` asks for distance at most ``eps``; ``Target("far", eta)`` at least ``eta``."""

    kind: str
    bound: Fraction

    @classmethod
    def parse(cls, text: str) -> "Target":
        kind, _, value = text.partition("=")
        if kind not in ("close", "far") or not value:
            raise ValueError(f"target must look like close=0.01 or far=0.2, got {text!r}")
        return cls(kind, Fraction(value))


class InfeasibleTarget(ValueError):
    pass


def make_pair_with_target(
    circuit: Circuit,
    w1: WeightFn,
    target: Target,
    rng: random.Random,
    steps: int = 40,
) -> PerturbedPair:
    """Search a single-variable perturbation meeting ``target``.

    Variables are tried in random order, moving the weight toward 0 or toward
    1. Bisection over dyadic weights between the current weight and the
    extreme ``2**-steps`` (or ``1 - 2**-steps``) finds the smallest move
    reaching a far target, or the largest move staying within a close target.
    """
    kind, bound = target.kind, Fraction(target.bound)
    if kind not in ("close", "far"):
        raise ValueError(f"unknown target kind {kind!r}")
    if wmc_exact(circuit, w1) == 0:
        raise UnsatisfiableError("circuit is unsatisfiable")
    tiny = Fraction(1, 1 << steps)
    order = list(range(1, circuit.n_vars + 1))
    rng.shuffle(order)
    for v in order:
        directions = [tiny, 1 - tiny]
        rng.shuffle(directions)
        for extreme in directions:
            if extreme == w1[v]:
                continue
            far_end = perturb_one_var(circuit, w1, v, extreme)
            d_far = far_end.dtv_closed_form
            if d_far == 0:
                continue  # v does not influence the distribution
            if kind == "far" and d_far < bound:
                continue
            if kind == "close" and d_far <= bound:
                return far_end
            # invariant: `good` meets the target, `bad` does not
            if kind == "far":
                good, bad = extreme, w1[v]
            else:
                good, bad = w1[v], extreme
            good_pair = far_end if kind == "far" else None
            for _ in range(steps):
                mid = (good + bad) / 2
                if mid == w1[v]:
                    break
                pair = perturb_one_var(circuit, w1, v, mid)
                ok = pair.dtv_closed_form >= bound if kind == "far" else pair.dtv_closed_form <= bound
                if ok:
                    good, good_pair = mid, pair
                else:
                    bad = mid
            if good_pair is not None:
                return good_pair
    raise InfeasibleTarget(f"no single-variable perturbation reaches {kind}={bound}")
