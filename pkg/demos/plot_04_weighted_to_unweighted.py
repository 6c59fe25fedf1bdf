"""
From weighted to unweighted counting
====================================

Dyadic weights d/2^p can be simulated by uniform counting: each literal is
conjoined with a chain formula over p fresh variables with exactly d (or
2^p - d) models.
"""

from fractions import Fraction

from pcdist import CircuitBuilder, chain_formula, dyadic_approx, enumerate_models, exact_pmf, wmc_exact
from pcdist import weighted_to_unweighted, WeightFn

for d in range(1, 8):
    print(f"chain({d}, 3):", len(enumerate_models(chain_formula(d, 3))), "models")

# %%
# A two-variable circuit x1 or (not x1 and x2) with weights rounded to 3 bits.
b = CircuitBuilder(2)
phi = b.build(b.disj([b.lit(1), b.conj([b.lit(-1), b.lit(2)])], decision=1))
dyadic = dyadic_approx(WeightFn([Fraction(1, 3), Fraction(3, 5)]), 3)
w = dyadic.to_weightfn()
print("rounded weights:", [str(p) for p in w.probs], "max relative error:", float(dyadic.max_rel_error))

reduced = weighted_to_unweighted(phi, dyadic)
models = enumerate_models(reduced)
print("reduced circuit has", reduced.n_vars, "variables and", len(models), "models")
print("weighted count * 2^(np):", wmc_exact(phi, w) * 2 ** (2 * 3))

# %%
# Projecting uniform models of the reduced circuit onto x1, x2 recovers the
# weighted distribution exactly.
projected = {}
for m in models:
    projected[m[:2]] = projected.get(m[:2], 0) + Fraction(1, len(models))
print(projected == exact_pmf(phi, w), {k: str(v) for k, v in sorted(projected.items())})
