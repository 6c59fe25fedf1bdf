"""
Testing closeness of two distributions
======================================

Build pairs whose total variation distance is known exactly, then let the
sampling-based closeness test decide whether they are close or far.
"""

import random
from fractions import Fraction

from pcdist import TeqParams, sample_size, teq, tv_bound_report, tv_exact
from pcdist.benchgen import Target, make_pair_with_target, random_instance

params = TeqParams("0.01", "0.2", "0.01")
print("samples per run:", sample_size(params))
print("conservative:", sample_size(TeqParams("0.01", "0.2", "0.01", "conservative")))

rng = random.Random(7)
_, circuit, w1 = random_instance(14, rng, ratio=3.0)

# %%
# One pair within distance 0.01, one at distance at least 0.2. The distance
# comes from a closed form and agrees with full enumeration.
for target in (Target("close", Fraction(1, 100)), Target("far", Fraction(1, 5))):
    pair = make_pair_with_target(circuit, w1, target, rng)
    assert pair.dtv_closed_form == tv_exact(circuit, pair.w1, circuit, pair.w2)
    verdict, trace = teq(circuit, pair.w1, circuit, pair.w2, params, rng)
    report = tv_bound_report(trace, params)
    print(
        f"{target.kind:5s} dtv={float(pair.dtv_closed_form):.4f}",
        f"verdict={verdict.decision.value}",
        f"estimate={float(report['estimate']):.4f}",
        f"threshold/m={float(verdict.threshold / verdict.m):.4f}",
    )

# %%
# The same test with noisy counting and sampling oracles, running at exactly
# the tolerances the test asks of them.
pair = make_pair_with_target(circuit, w1, Target("far", Fraction(1, 5)), rng)
verdict, _ = teq(circuit, pair.w1, circuit, pair.w2, params, rng, noise=True)
print("noisy oracles:", verdict.decision.value, "skipped samples:", verdict.skipped)
