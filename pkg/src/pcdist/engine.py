"""Exact counting, sampling and network-polynomial evaluation on smooth d-DNNF.

Every routine works on the smoothed form of its input (computed once and
cached on the circuit) and in exact rational arithmetic. Per-node weighted
counts and the integer selection thresholds used by the samplers are cached
per ``(circuit, weight function)`` pair.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence

import numpy as np

from .circuit import (
    SEMANTIC_LIMIT,
    Circuit,
    Determinism,
    Kind,
    StructuralError,
    smooth,
    structural_report,
)
from .weights import WeightFn

__all__ = [
    "OracleParams",
    "UnsatisfiableError",
    "wmc_exact",
    "wmc_conditioned",
    "node_counts",
    "choice_probabilities",
    "awct",
    "sample",
    "sample_many",
    "samp",
    "netpoly_eval",
    "sqrt_floor",
    "RESOLUTION_BITS",
]

# Bits of the uniform draw used for each OR-node choice; selection bias is at most 2**-RESOLUTION_BITS.
RESOLUTION_BITS = 128


class UnsatisfiableError(ValueError):
    """Raised when an operation needs at least one model."""


@dataclass(frozen=True)
class OracleParams:
    """Tolerance ``alpha`` and failure probability ``beta`` of an approximate oracle.

    ``alpha = 0`` / ``beta = 0`` are accepted and make the noisy oracles exact.
    """

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0,1)")


def _require_ddnnf(circuit: Circuit) -> None:
    report = structural_report(circuit, SEMANTIC_LIMIT)
    if not report.decomposable:
        raise StructuralError("circuit is not decomposable")
    if report.deterministic == Determinism.VIOLATED:
        raise StructuralError("circuit is not deterministic")
    if report.deterministic == Determinism.UNKNOWN:
        raise StructuralError(
            f"determinism could not be verified (not decision-form and more than {SEMANTIC_LIMIT} variables); "
            "pass check=False to skip"
        )


def _prepared(circuit: Circuit, w: WeightFn | None, check: bool) -> Circuit:
    if w is not None and len(w) != circuit.n_vars:
        raise ValueError(f"weights cover {len(w)} variables, circuit has {circuit.n_vars}")
    if check:
        _require_ddnnf(circuit)
    return smooth(circuit)


def _upward(circuit: Circuit, pos: Sequence[Fraction], neg: Sequence[Fraction]) -> list[Fraction]:
    """Sum at OR, product at AND, ``pos[v]``/``neg[v]`` at literal leaves (1-based)."""
    vals: list[Fraction] = []
    one, zero = Fraction(1), Fraction(0)
    for node in circuit.nodes:
        k = node.kind
        if k == Kind.LIT:
            vals.append(pos[node.lit] if node.lit > 0 else neg[-node.lit])
        elif k == Kind.AND:
            acc = one
            for c in node.children:
                acc *= vals[c]
            vals.append(acc)
        elif k == Kind.OR:
            acc = zero
            for c in node.children:
                acc += vals[c]
            vals.append(acc)
        else:
            vals.append(one if k == Kind.TRUE else zero)
    return vals


def node_counts(circuit: Circuit, w: WeightFn, check: bool = True) -> tuple[Circuit, list[Fraction]]:
    """Smoothed circuit and the weighted model count of each of its nodes."""
    s = _prepared(circuit, w, check)
    key = ("wmc", w)
    vals = s._cache.get(key)
    if vals is None:
        pos = [Fraction(0), *w.probs]
        neg = [Fraction(0), *(1 - p for p in w.probs)]
        vals = _upward(s, pos, neg)
        s._cache[key] = vals
    return s, vals


def wmc_exact(circuit: Circuit, w: WeightFn, check: bool = True) -> Fraction:
    """Weighted model count: the sum over models of the literal-weight product."""
    return node_counts(circuit, w, check)[1][-1]


def wmc_conditioned(circuit: Circuit, w: WeightFn, lit: int, check: bool = True) -> Fraction:
    """Weighted count of ``circuit and lit`` with the weight of ``lit`` itself replaced by 1."""
    s = _prepared(circuit, w, check)
    pos = [Fraction(0), *w.probs]
    neg = [Fraction(0), *(1 - p for p in w.probs)]
    v = abs(lit)
    pos[v], neg[v] = (Fraction(1), Fraction(0)) if lit > 0 else (Fraction(0), Fraction(1))
    return _upward(s, pos, neg)[-1]


def choice_probabilities(circuit: Circuit, w: WeightFn, check: bool = True) -> tuple[Circuit, dict[int, list[Fraction]]]:
    """For each OR node of the smoothed circuit, the exact probability of descending into each child."""
    s, vals = node_counts(circuit, w, check)
    out = {}
    for i, node in enumerate(s.nodes):
        if node.kind == Kind.OR and vals[i]:
            out[i] = [vals[c] / vals[i] for c in node.children]
    return s, out


def _thresholds(circuit: Circuit, w: WeightFn, check: bool) -> tuple[Circuit, list[Fraction], dict[int, list[int]]]:
    s, vals = node_counts(circuit, w, check)
    key = ("thresholds", w)
    table = s._cache.get(key)
    if table is None:
        scale = 1 << RESOLUTION_BITS
        table = {}
        for i, node in enumerate(s.nodes):
            if node.kind != Kind.OR or not vals[i]:
                continue
            cum = Fraction(0)
            ts = []
            for c in node.children:
                cum += vals[c]
                q = cum * scale / vals[i]
                ts.append(-((-q.numerator) // q.denominator))  # ceil
            table[i] = ts
        s._cache[key] = table
    return s, vals, table


def sample(circuit: Circuit, w: WeightFn, rng, check: bool = True) -> tuple[int, ...]:
    """Draw one model with probability ``w(sigma) / w(circuit)``.

    Top-down pass: at an OR node a child is chosen with probability
    proportional to its weighted count, at an AND node every child is visited.
    """
    s, vals, table = _thresholds(circuit, w, check)
    if not vals[-1]:
        raise UnsatisfiableError("cannot sample from an unsatisfiable circuit")
    bits = [0] * s.n_vars
    nodes = s.nodes
    stack = [s.root]
    while stack:
        i = stack.pop()
        node = nodes[i]
        k = node.kind
        if k == Kind.OR:
            j = bisect_right(table[i], rng.getrandbits(RESOLUTION_BITS))
            stack.append(node.children[j])
        elif k == Kind.AND:
            stack.extend(node.children)
        elif k == Kind.LIT:
            bits[node.var - 1] = 1 if node.lit > 0 else 0
    return tuple(bits)


def sample_many(circuit: Circuit, w: WeightFn, count: int, rng, check: bool = True) -> np.ndarray:
    """``count`` independent draws as a ``(count, n)`` uint8 array.

    Same distribution as :func:`sample`, but the draws travel down the DAG
    together: each node receives the ids of the draws passing through it, so
    the per-node work is a tight loop instead of a traversal per draw.
    """
    s, vals, table = _thresholds(circuit, w, check)
    if not vals[-1]:
        raise UnsatisfiableError("cannot sample from an unsatisfiable circuit")
    out = np.zeros((count, s.n_vars), dtype=np.uint8)
    incoming: list[list[int]] = [[] for _ in s.nodes]
    incoming[-1] = list(range(count))
    getrandbits = rng.getrandbits
    for i in range(len(s.nodes) - 1, -1, -1):
        ids = incoming[i]
        if not ids:
            continue
        node = s.nodes[i]
        k = node.kind
        if k == Kind.OR:
            ts = table[i]
            kids = node.children
            for d in ids:
                incoming[kids[bisect_right(ts, getrandbits(RESOLUTION_BITS))]].append(d)
        elif k == Kind.AND:
            for c in node.children:
                incoming[c].extend(ids)
        elif k == Kind.LIT:
            out[ids, node.var - 1] = 1 if node.lit > 0 else 0
        incoming[i] = []
    return out


def sqrt_floor(x: Fraction, bits: int = 64) -> Fraction:
    """Largest multiple of ``2**-bits`` whose square does not exceed ``x``."""
    scale = 1 << bits
    q = x * scale * scale
    return Fraction(isqrt(q.numerator // q.denominator), scale)


def _uniform(rng, bits: int = 64) -> Fraction:
    return Fraction(rng.getrandbits(bits), 1 << bits)


def _bernoulli(rng, p: Fraction) -> bool:
    return p > 0 and _uniform(rng) < p


def awct(circuit: Circuit, w: WeightFn, params: OracleParams, rng, noise: bool = False, check: bool = True) -> Fraction:
    """Approximate weighted count within factor ``1 + alpha`` with probability ``1 - beta``.

    Without ``noise`` the exact count is returned. With ``noise`` the count is
    scaled by a uniform factor in ``[1/(1+alpha), 1+alpha]``; with probability
    ``beta`` the factor is instead ``2(1+alpha)`` or its inverse, outside the
    tolerance band.
    """
    exact = wmc_exact(circuit, w, check)
    if not noise:
        return exact
    hi = 1 + params.alpha
    if _bernoulli(rng, params.beta):
        factor = 2 * hi if rng.getrandbits(1) else 1 / (2 * hi)
    else:
        lo = 1 / hi
        factor = lo + (hi - lo) * _uniform(rng)
    return exact * factor


def _tilt(sigma: Sequence[int], key: int) -> int:
    digest = hashlib.blake2b(bytes(sigma), digest_size=8, key=key.to_bytes(8, "little")).digest()
    return digest[0] & 1


def samp(
    circuit: Circuit,
    w: WeightFn,
    params: OracleParams,
    rng,
    noise: bool = False,
    noise_key: int = 0,
    check: bool = True,
) -> Optional[tuple[int, ...]]:
    """Approximate sampler; ``None`` stands for the failure symbol.

    Without ``noise`` this is :func:`sample` and never fails. With ``noise`` it
    fails with probability ``beta`` and otherwise draws from a fixed tilted
    distribution: each model gets a factor ``s`` or ``1/s`` (chosen by a keyed
    hash, ``s`` the largest 64-bit dyadic not above ``sqrt(1+alpha)``) and the
    result is renormalized by rejection. The ratio of the tilted pmf to the
    exact one therefore stays inside ``[1/(1+alpha), 1+alpha]``.
    """
    if not noise:
        return sample(circuit, w, rng, check)
    if _bernoulli(rng, params.beta):
        return None
    s = sqrt_floor(1 + params.alpha)
    low_accept = 1 / (s * s)
    while True:
        sigma = sample(circuit, w, rng, check)
        if _tilt(sigma, noise_key) or low_accept == 1 or _bernoulli(rng, low_accept):
            return sigma


def netpoly_eval(circuit: Circuit, w: WeightFn, theta: Sequence[int], check: bool = True) -> Fraction:
    """Network polynomial of ``(circuit, w)`` at an integer point ``theta``.

    Leaves evaluate to ``w(x) * theta(x)`` and ``(1 - w(x)) * (1 - theta(x))``;
    OR sums, AND multiplies; the root value is divided by the weighted count.
    On 0/1 points this is the probability of that assignment.
    """
    s, vals = node_counts(circuit, w, check)
    if len(theta) != circuit.n_vars:
        raise ValueError(f"theta has length {len(theta)}, circuit has {circuit.n_vars} variables")
    if not vals[-1]:
        raise UnsatisfiableError("network polynomial undefined: weighted count is zero")
    pos = [Fraction(0)] + [p * t for p, t in zip(w.probs, theta)]
    neg = [Fraction(0)] + [(1 - p) * (1 - t) for p, t in zip(w.probs, theta)]
    return _upward(s, pos, neg)[-1] / vals[-1]
