"""Closeness (Teq) and equivalence (Peq) tests for pairs of weighted circuits."""

from __future__ import annotations

import enum
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

from .circuit import Circuit, evaluate
from .engine import OracleParams, UnsatisfiableError, awct, netpoly_eval, samp, sqrt_floor, wmc_exact
from .weights import WeightFn, weight_of

__all__ = [
    "Decision",
    "TeqParams",
    "Verdict",
    "TraceRow",
    "TeqTrace",
    "sample_size",
    "teq",
    "peq",
    "tv_bound_report",
    "ln_bounds",
]


class Decision(str, enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"


def _frac(x) -> Fraction:
    # str() keeps float literals such as 0.2 at their decimal value
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class TeqParams:
    """Closeness ``eps``, farness ``eta`` and confidence ``delta``.

    ``mode`` selects the sample-size formula: ``"experiment"`` uses
    ``ceil(ln(2/delta) / (2 gamma^2))`` (gives m=294 at eps=0.01, eta=0.2,
    delta=0.01) and ``"conservative"`` uses ``ceil(2 ln(4/delta) / gamma^2)``.
    Floats are converted through their decimal representation.
    """

    eps: Fraction
    eta: Fraction
    delta: Fraction
    mode: str = "experiment"

    def __post_init__(self):
        for name in ("eps", "eta", "delta"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if not 0 <= self.eps < self.eta <= 1:
            raise ValueError(f"need 0 <= eps < eta <= 1, got eps={self.eps}, eta={self.eta}")
        if not 0 < self.delta < 1:
            raise ValueError(f"need 0 < delta < 1, got {self.delta}")
        if self.mode not in ("experiment", "conservative"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def gamma(self) -> Fraction:
        return (self.eta - self.eps) / 2


def ln_bounds(x: Fraction, digits: int = 60) -> tuple[Fraction, Fraction]:
    """Rational interval containing ``ln(x)``, of width about ``2 * 10**-digits``."""
    with localcontext() as ctx:
        ctx.prec = digits + 20
        value = (Decimal(x.numerator) / Decimal(x.denominator)).ln()
    err = Fraction(1, 10**digits)
    v = Fraction(value)
    return v - err, v + err


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def sample_size(params: TeqParams) -> int:
    """Number of samples ``m``; the ceiling is certified against rounding in ``ln``."""
    g2 = params.gamma**2
    if params.mode == "experiment":
        arg, scale = 2 / params.delta, 1 / (2 * g2)
    else:
        arg, scale = 4 / params.delta, 2 / g2
    digits = 60
    while True:
        lo, hi = ln_bounds(arg, digits)
        m_lo, m_hi = _ceil(lo * scale), _ceil(hi * scale)
        if m_lo == m_hi:
            return m_lo
        digits *= 2


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    statistic: Fraction
    threshold: Fraction
    m: int
    skipped: int = 0
    witness: Optional[tuple[int, ...]] = None

    @property
    def accepted(self) -> bool:
        return self.decision == Decision.ACCEPT


@dataclass(frozen=True)
class TraceRow:
    sigma: Optional[tuple[int, ...]]
    s1: Fraction
    s2: Fraction
    r: Optional[Fraction]
    gamma_i: Fraction


@dataclass
class TeqTrace:
    k1: Fraction
    k2: Fraction
    rows: list[TraceRow] = field(default_factory=list)


def _iteration_rng(base: int, i: int) -> random.Random:
    # counter-mode stream splitting: iteration i always sees the same stream
    return random.Random(f"teq:{base}:{i}")


def teq(
    c1: Circuit,
    w1: WeightFn,
    c2: Circuit,
    w2: WeightFn,
    params: TeqParams,
    rng: random.Random,
    noise: bool = False,
    threads: int = 1,
) -> tuple[Verdict, TeqTrace]:
    """Decide whether ``P(c1,w1)`` is ``eps``-close to or ``eta``-far from ``P(c2,w2)``.

    Samples are drawn only from the first pair. Each sample's estimated ratio
    ``r = (s2/k2) * (k1/s1)`` contributes ``1 - r`` when below 1; the test
    accepts iff the total is at most ``m (eps + gamma)``. A sample outside the
    second circuit's models has ``s2 = 0`` and contributes 1. With ``noise``
    the counting and sampling oracles run in their noisy modes at exactly the
    tolerances the test requests.

    Results depend only on ``rng``'s state, not on ``threads``: iteration ``i``
    uses its own stream derived from one draw of ``rng``.
    """
    if c1.n_vars != c2.n_vars:
        raise ValueError(f"circuits have {c1.n_vars} and {c2.n_vars} variables")
    if wmc_exact(c1, w1) == 0 or wmc_exact(c2, w2) == 0:
        raise UnsatisfiableError("both circuits must be satisfiable")

    gamma = params.gamma
    m = sample_size(params)
    count_params = OracleParams(sqrt_floor(1 + gamma / 4) - 1, params.delta / 8)
    k1 = awct(c1, w1, count_params, rng, noise=noise)
    k2 = awct(c2, w2, count_params, rng, noise=noise)
    samp_params = OracleParams(gamma / (4 * params.eta - 2 * gamma), params.delta / (4 * m))
    base = rng.getrandbits(64)
    noise_key = rng.getrandbits(64)

    def iteration(i: int) -> TraceRow:
        sigma = samp(c1, w1, samp_params, _iteration_rng(base, i), noise=noise, noise_key=noise_key)
        if sigma is None:
            return TraceRow(None, Fraction(0), Fraction(0), None, Fraction(0))
        s1 = weight_of(sigma, w1)
        s2 = weight_of(sigma, w2) if evaluate(c2, sigma) else Fraction(0)
        r = (s2 / k2) * (k1 / s1)
        return TraceRow(sigma, s1, s2, r, 1 - r if r < 1 else Fraction(0))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(iteration, range(m)))
    else:
        rows = [iteration(i) for i in range(m)]

    statistic = sum((row.gamma_i for row in rows), Fraction(0))
    threshold = m * (params.eps + gamma)
    skipped = sum(row.sigma is None for row in rows)
    decision = Decision.ACCEPT if statistic <= threshold else Decision.REJECT
    return Verdict(decision, statistic, threshold, m, skipped), TeqTrace(k1, k2, rows)


def peq(c1: Circuit, w1: WeightFn, c2: Circuit, w2: WeightFn, delta, rng: random.Random) -> Verdict:
    """Equivalence test: compare both network polynomials at a random point of ``[m]^n``, ``m = ceil(n/delta)``.

    Equivalent inputs are always accepted. The verdict's ``statistic`` is the
    absolute difference of the two values and ``witness`` the point used.
    """
    delta = _frac(delta)
    if not 0 < delta < 1:
        raise ValueError(f"need 0 < delta < 1, got {delta}")
    if c1.n_vars != c2.n_vars:
        raise ValueError(f"circuits have {c1.n_vars} and {c2.n_vars} variables")
    n = c1.n_vars
    m = _ceil(Fraction(n) / delta)
    theta = tuple(rng.randint(1, m) for _ in range(n)) if m >= 1 else ()
    diff = abs(netpoly_eval(c1, w1, theta) - netpoly_eval(c2, w2, theta))
    decision = Decision.ACCEPT if diff == 0 else Decision.REJECT
    return Verdict(decision, diff, Fraction(0), m, 0, theta)


def tv_bound_report(trace: TeqTrace, params: TeqParams) -> dict:
    """Diagnostic summary: ``statistic / m`` estimates the distance under the first distribution's view."""
    m = len(trace.rows)
    statistic = sum((row.gamma_i for row in trace.rows), Fraction(0))
    return {
        "estimate": statistic / m if m else Fraction(0),
        "statistic": statistic,
        "gamma": params.gamma,
        "threshold": m * (params.eps + params.gamma),
        "m": m,
        "skipped": sum(row.sigma is None for row in trace.rows),
    }
