"""Brute-force ground truth by enumerating every assignment.

Assignments are tuples of 0/1 with ``sigma[i-1]`` the value of ``x_i``; all
results come back in lexicographic order. The circuit is evaluated on every
assignment, 2**16 at a time in bit-parallel form.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Iterable

from .circuit import CapabilityError, Circuit, truth_table_chunks
from .engine import UnsatisfiableError
from .weights import WeightFn

__all__ = [
    "ENUMERATION_LIMIT",
    "model_indices",
    "enumerate_models",
    "WeightTable",
    "exact_pmf",
    "tv_exact",
    "empirical_l1",
    "index_to_assignment",
]

ENUMERATION_LIMIT = 24


def _guard(n: int, limit: int) -> None:
    if n > limit:
        raise CapabilityError(f"enumeration limited to {limit} variables (got {n}); raise `limit` to override")


def _set_bits(x: int) -> list[int]:
    s = bin(x)[:1:-1]
    return [i for i, ch in enumerate(s) if ch == "1"]


def model_indices(circuit: Circuit, limit: int = ENUMERATION_LIMIT) -> list[int]:
    """Indices (``x_1`` most significant) of all satisfying assignments, ascending."""
    _guard(circuit.n_vars, limit)
    out: list[int] = []
    for offset, _, vals in truth_table_chunks(circuit):
        out.extend(offset + j for j in _set_bits(vals[-1]))
    return out


def index_to_assignment(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


def enumerate_models(circuit: Circuit, limit: int = ENUMERATION_LIMIT) -> list[tuple[int, ...]]:
    n = circuit.n_vars
    return [index_to_assignment(i, n) for i in model_indices(circuit, limit)]


def _table(probs) -> tuple[list[int], int]:
    table = [1]
    denom = 1
    for p in probs:
        a, d = p.numerator, p.denominator
        b = d - a
        nxt = []
        for v in table:
            nxt.append(v * b)
            nxt.append(v * a)
        table = nxt
        denom *= d
    return table, denom


class WeightTable:
    """Integer literal weights of assignments over a common denominator.

    ``table[idx] / table.denom`` is the weight of assignment ``idx``. The
    table is split into two half-width lookups so it stays small for every
    ``n`` the enumeration guard admits.
    """

    def __init__(self, w: WeightFn):
        half = len(w) // 2
        self.low_bits = len(w) - half
        self.high, dh = _table(w.probs[:half])
        self.low, dl = _table(w.probs[half:])
        self.denom = dh * dl

    def __getitem__(self, idx: int) -> int:
        return self.high[idx >> self.low_bits] * self.low[idx & ((1 << self.low_bits) - 1)]


def exact_pmf(circuit: Circuit, w: WeightFn, limit: int = ENUMERATION_LIMIT) -> dict[tuple[int, ...], Fraction]:
    """Exact distribution over models, normalized by their total weight."""
    if len(w) != circuit.n_vars:
        raise ValueError(f"weights cover {len(w)} variables, circuit has {circuit.n_vars}")
    idx = model_indices(circuit, limit)
    if not idx:
        raise UnsatisfiableError("unsatisfiable circuit has no distribution")
    table = WeightTable(w)
    total = sum(table[i] for i in idx)
    n = circuit.n_vars
    return {index_to_assignment(i, n): Fraction(table[i], total) for i in idx}


def tv_exact(c1: Circuit, w1: WeightFn, c2: Circuit, w2: WeightFn, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """Half the L1 distance between the two distributions, summed over all assignments."""
    if not c1.n_vars == c2.n_vars == len(w1) == len(w2):
        raise ValueError("circuits and weight functions must share the same variables")
    idx1, idx2 = model_indices(c1, limit), model_indices(c2, limit)
    if not idx1 or not idx2:
        raise UnsatisfiableError("both circuits must be satisfiable")
    t1, t2 = WeightTable(w1), WeightTable(w2)
    n1 = dict((i, t1[i]) for i in idx1)
    n2 = dict((i, t2[i]) for i in idx2)
    z1, z2 = sum(n1.values()), sum(n2.values())
    # |a/z1 - b/z2| = |a z2 - b z1| / (z1 z2)
    total = 0
    for i in n1.keys() | n2.keys():
        total += abs(n1.get(i, 0) * z2 - n2.get(i, 0) * z1)
    return Fraction(total, 2 * z1 * z2)


def empirical_l1(samples: Iterable, pmf: dict[tuple[int, ...], Fraction]) -> Fraction:
    """L1 distance between the empirical frequencies of ``samples`` and ``pmf``."""
    counts = Counter(tuple(int(b) for b in s) for s in samples)
    total = sum(counts.values())
    if not total:
        raise ValueError("need at least one sample")
    dist = Fraction(0)
    for sigma in counts.keys() | pmf.keys():
        dist += abs(Fraction(counts.get(sigma, 0), total) - pmf.get(sigma, 0))
    return dist
