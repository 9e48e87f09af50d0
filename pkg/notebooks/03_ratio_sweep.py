"""
How far are real sets from the bounds?
======================================

A seeded sweep over primes, families and sizes, reported as the ratio of
max(|A+A|, |AA|) to each bound.  Reruns give byte-identical CSV.
"""

# %%
import csv
import io
from collections import defaultdict

from sumprod import ExperimentConfig, FamilySpec, run_sweep
from sumprod.sweep import rows_to_csv

cfg = ExperimentConfig(
    primes=[1009],
    families=[FamilySpec("random"), FamilySpec("interval"),
              FamilySpec("geometric-progression"), FamilySpec("multiplicative-subgroup")],
    sizes=[8, 16, 36, 63, 100], trials=3, master_seed=1)
text = rows_to_csv(run_sweep(cfg))
print(text.splitlines()[0])

# %%
# Smallest ratio per family.
best = defaultdict(lambda: float("inf"))
for row in csv.DictReader(io.StringIO(text)):
    best[row["family"]] = min(best[row["family"]], float(row["ratio_thm1"]))
for fam, r in sorted(best.items(), key=lambda kv: kv[1]):
    print(f"{fam:24s} {r:.3f}")
