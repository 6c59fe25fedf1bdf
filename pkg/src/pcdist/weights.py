"""Literal-weighted functions, dyadic approximation and the chain-formula
reduction from weighted to unweighted circuits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .circuit import Circuit, CircuitBuilder, Kind, smooth

__all__ = [
    "WeightFn",
    "DyadicWeightFn",
    "weight_of",
    "dyadic_approx",
    "chain_formula",
    "weighted_to_unweighted",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class WeightFn:
    """Weight ``p_i`` of the positive literal of each variable; ``1 - p_i`` for the negative."""

    probs: tuple[Fraction, ...]

    def __init__(self, probs: Iterable):
        probs = tuple(Fraction(p) for p in probs)
        for i, p in enumerate(probs, start=1):
            if not 0 < p < 1:
                raise ValueError(f"weight of variable {i} is {p}, must lie in (0,1)")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> "WeightFn":
        return cls([HALF] * n)

    @property
    def n(self) -> int:
        return len(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, var: int) -> Fraction:
        if not 1 <= var <= len(self.probs):
            raise IndexError(f"variable {var} outside 1..{len(self.probs)}")
        return self.probs[var - 1]

    def literal(self, lit: int) -> Fraction:
        p = self.probs[abs(lit) - 1]
        return p if lit > 0 else 1 - p

    def replace(self, var: int, p) -> "WeightFn":
        probs = list(self.probs)
        probs[var - 1] = Fraction(p)
        return WeightFn(probs)


def weight_of(sigma: Sequence[int], w: WeightFn) -> Fraction:
    """Product over variables of ``w(x)`` when ``sigma(x)=1`` and ``1-w(x)`` otherwise."""
    if len(sigma) != len(w):
        raise ValueError(f"assignment has length {len(sigma)}, weight function covers {len(w)} variables")
    num = den = 1
    for bit, p in zip(sigma, w.probs):
        num *= p.numerator if bit else p.denominator - p.numerator
        den *= p.denominator
    return Fraction(num, den)


@dataclass(frozen=True)
class DyadicWeightFn:
    """Weights ``d_i / 2**precision`` with ``0 < d_i < 2**precision``."""

    numerators: tuple[int, ...]
    precision: int
    max_rel_error: Fraction = Fraction(0)

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be at least 1")
        top = 1 << self.precision
        for i, d in enumerate(self.numerators, start=1):
            if not 0 < d < top:
                raise ValueError(f"numerator {d} of variable {i} outside 1..{top - 1}")

    def __len__(self) -> int:
        return len(self.numerators)

    def to_weightfn(self) -> WeightFn:
        return WeightFn(Fraction(d, 1 << self.precision) for d in self.numerators)


def dyadic_approx(w: WeightFn, precision: int = 16) -> DyadicWeightFn:
    """Round each weight to the nearest ``d / 2**precision`` (ties upward), keeping ``d`` in ``1..2**precision - 1``."""
    if precision < 1:
        raise ValueError("precision must be at least 1")
    top = 1 << precision
    nums = []
    worst = Fraction(0)
    for p in w.probs:
        scaled = p * top
        d = int(scaled + HALF)  # floor(x + 1/2) for positive x
        d = min(max(d, 1), top - 1)
        nums.append(d)
        worst = max(worst, abs(Fraction(d, top) - p) / p)
    return DyadicWeightFn(tuple(nums), precision, worst)


def _chain_into(b: CircuitBuilder, d: int, variables: Sequence[int], decision_form: bool) -> int:
    """Formula over ``variables`` (most significant first) with exactly ``d`` models.

    Reading ``d`` in binary, a 1-bit at position ``i`` becomes ``y_i or (rest)``
    and a 0-bit becomes ``not y_i and (rest)``; trailing variables after the
    last 1-bit stay unconstrained. With ``decision_form`` the OR nodes are
    written as ``y_i or (not y_i and rest)`` so the result is deterministic, at
    the cost of mentioning ``y_i`` twice.
    """
    p = len(variables)
    bits = [(d >> (p - 1 - i)) & 1 for i in range(p)]
    last = max(i for i, bit in enumerate(bits) if bit)
    node = b.lit(variables[last])
    for i in range(last - 1, -1, -1):
        y = variables[i]
        if bits[i]:
            if decision_form:
                node = b.disj([b.lit(y), b.conj([b.lit(-y), node])], decision=y)
            else:
                node = b.disj([b.lit(y), node])
        else:
            node = b.conj([b.lit(-y), node])
    return node


def chain_formula(d: int, p: int, decision_form: bool = False) -> Circuit:
    """Circuit over ``p`` fresh variables with exactly ``d`` satisfying assignments."""
    if p < 1 or not 0 < d < (1 << p):
        raise ValueError(f"need 0 < d < 2**p, got d={d}, p={p}")
    b = CircuitBuilder(p)
    return b.build(_chain_into(b, d, range(1, p + 1), decision_form))


def weighted_to_unweighted(circuit: Circuit, w: DyadicWeightFn, decision_form: bool = False) -> Circuit:
    """Encode dyadic literal weights with chain formulas.

    Variable ``x_i`` receives ``p`` fresh variables numbered
    ``n + (i-1)p + 1 .. n + ip``. In the smoothed input every positive leaf
    ``x_i`` becomes ``x_i and C1_i`` (``d_i`` models over the fresh block) and
    every negative leaf becomes ``not x_i and C0_i`` (``2**p - d_i`` models).
    Projecting the uniform distribution over the result's models onto
    ``x_1..x_n`` gives the weighted distribution of the input.
    """
    n, p = circuit.n_vars, w.precision
    if len(w) != n:
        raise ValueError(f"weights cover {len(w)} variables, circuit has {n}")
    src = smooth(circuit)
    b = CircuitBuilder(n + n * p)
    leaves: dict[int, int] = {}

    def leaf(lit: int) -> int:
        if lit not in leaves:
            i = abs(lit)
            block = range(n + (i - 1) * p + 1, n + i * p + 1)
            d = w.numerators[i - 1]
            count = d if lit > 0 else (1 << p) - d
            leaves[lit] = b.conj([b.lit(lit), _chain_into(b, count, block, decision_form)])
        return leaves[lit]

    new: list[int] = []
    for node in src.nodes:
        if node.kind == Kind.LIT:
            new.append(leaf(node.lit))
        elif node.kind == Kind.TRUE:
            new.append(b.true())
        elif node.kind == Kind.FALSE:
            new.append(b.false())
        elif node.kind == Kind.AND:
            new.append(b.conj(new[c] for c in node.children))
        else:
            new.append(b.disj((new[c] for c in node.children), decision=node.decision))
    return b.build(new[-1])
