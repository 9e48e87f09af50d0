"""
Set arithmetic in a prime field
===============================

Sets are dense membership vectors over Z/pZ.  Sums, products, dilates and
energies are exact integer computations.
"""

# %%
# The quadratic residues mod 7 form the subgroup {1, 2, 4}.  Its sum set
# fills every nonzero residue while its product set stays put.
from sumprod import make_field, make_set, mult_energy_J, productset, sumset

F7 = make_field(7)
Q = make_set(F7, [1, 2, 4])
print("Q + Q =", sumset(Q, Q).tolist())
print("Q * Q =", productset(Q, Q).tolist())

# %%
# A subgroup has the largest possible multiplicative energy, |A|^3.
rep = mult_energy_J(Q)
print("J(Q) =", rep.value, " |Q|^4/|QQ| =", rep.bound_sides[1])

# %%
# At a larger prime an interval and a subgroup of the same size pull in
# opposite directions: one has a small sum set, the other a small product set.
from sumprod import FamilySpec, gen_family

F = make_field(1009)
interval = gen_family(F, FamilySpec("interval", size=144))
subgroup = gen_family(F, FamilySpec("multiplicative-subgroup", order=144))
for name, A in (("interval", interval), ("subgroup", subgroup)):
    print(f"{name:9s} |A+A| = {sumset(A, A).size:4d}   |AA| = {productset(A, A).size:4d}")
