"""
Walking the argument on a concrete set
======================================

``run_trace`` replays every step of the lower bound on an actual set and
records each inequality with exact rational sides.
"""

# %%
from sumprod import FamilySpec, gen_family, make_field, run_trace

F = make_field(257)
H = gen_family(F, FamilySpec("multiplicative-subgroup", order=128))
rec = run_trace(H)
print("branch:", rec.branch, " b0 =", rec.b0, " N =", rec.N, " |A1| =", rec.A1.size)

# %%
# Every step is a named check.  Large rationals are shown as floats here;
# the record itself keeps them exact.
for c in rec.checks:
    print(f"{'ok ' if c.passed else 'BAD'} {c.name:60s} {float(c.lhs):12.4g} {c.relation} "
          f"{float(c.rhs):.4g}")

# %%
# The headline bounds carry unknown constants, so only ratios are reported.
print(rec.bound_values)

# %%
# The small-A1 chain can also be checked on any pair A1 in A with |A1|^2 < p.
import numpy as np
from sumprod import case1_chain, make_set

A1 = make_set(F, np.random.default_rng(0).choice(H.elements, 12, replace=False))
wit, checks = case1_chain(H, A1)
print("witness", wit.witness, all(c.passed for c in checks))
