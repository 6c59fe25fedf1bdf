"""
Counting and sampling a weighted circuit
========================================

Compile a small random 3-CNF into a decision-DNNF, attach literal weights,
and compare exact counting and sampling against brute-force enumeration.
"""

import random
from fractions import Fraction

import numpy as np

from pcdist import enumerate_models, exact_pmf, sample_many, structural_report, wmc_exact
from pcdist.benchgen import random_instance

rng = random.Random(1)
cnf, circuit, w = random_instance(10, rng, ratio=4.1)
print(structural_report(circuit))
print("nodes:", len(circuit.nodes), "edges:", circuit.n_edges)

# %%
# The weighted count is the sum, over models, of the product of literal
# weights. Enumerating the 2^10 assignments gives the same rational.
count = wmc_exact(circuit, w)
pmf = exact_pmf(circuit, w)
print("weighted count:", count)
print("models:", len(enumerate_models(circuit)))

# %%
# Draw 20000 samples and compare empirical frequencies with the exact pmf.
draws = sample_many(circuit, w, 20_000, rng)
rows, counts = np.unique(draws, axis=0, return_counts=True)
freq = {tuple(r): c / len(draws) for r, c in zip(rows.tolist(), counts)}
top = sorted(pmf, key=pmf.get, reverse=True)[:5]
for sigma in top:
    print("".join(map(str, sigma)), f"exact {float(pmf[sigma]):.4f}", f"empirical {freq.get(sigma, 0):.4f}")

l1 = sum(abs(freq.get(s, 0) - float(p)) for s, p in pmf.items())
print("L1 distance:", round(l1, 4))
assert sum(pmf.values()) == Fraction(1)
