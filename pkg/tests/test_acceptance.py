"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are collected and
shown in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import csv
import io
import math
import sys
import time
from collections import Counter
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from sumprod import counting  # noqa: E402
from sumprod.counting import mult_energy_J, solution_count_I  # noqa: E402
from sumprod.families import FamilySpec, divisors, gen_family, mix_seed  # noqa: E402
from sumprod.field_sets import (difference, dilate, intersect, is_prime, make_field,  # noqa: E402
                                make_set, productset, sumset)
from sumprod.lemmas import (LemmaViolation, check_plunnecke, check_ruzsa_triangle,  # noqa: E402
                            find_xi_witness, xi_lower_bound)
from sumprod.sweep import ExperimentConfig, rows_to_csv, run_sweep  # noqa: E402
from sumprod.trace import case1_chain, run_trace  # noqa: E402

RESULTS: list[str] = []
_cache: dict = {}


@contextmanager
def criterion(num: int, title: str, limit_s: float):
    """Time the block, enforce the runtime limit and record one status line."""
    detail: dict = {}
    t0 = time.perf_counter()
    ok = False
    try:
        yield detail
        elapsed = time.perf_counter() - t0
        assert elapsed < limit_s, f"took {elapsed:.1f}s, limit {limit_s}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        extra = "; ".join(f"{k}={v}" for k, v in detail.items())
        line = (f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {title} "
                f"[{elapsed:.2f}s < {limit_s:g}s]" + (f"  {extra}" if extra else ""))
        RESULTS.append(line)
        print(line)


def rand_set(rng, p, lo=0, hi=None, size=None):
    hi = p if hi is None else hi
    if size is None:
        size = int(rng.integers(1, hi - lo + 1))
    return set(rng.choice(np.arange(lo, hi), size, replace=False).tolist())


SMALL_PRIMES = [p for p in range(2, 32) if is_prime(p)]


def test_c01_kernel_oracle_equivalence():
    with criterion(1, "kernels match double-loop oracle (p <= 31, 500 pairs)", 10) as d:
        rng = np.random.default_rng(101)
        mismatches = 0
        for i in range(500):
            p = SMALL_PRIMES[i % len(SMALL_PRIMES)]
            f = make_field(p)
            X = rand_set(rng, p, size=int(rng.integers(0, p + 1)))
            Y = rand_set(rng, p, size=int(rng.integers(0, p + 1)))
            a = int(rng.integers(0, p))
            FX, FY = make_set(f, X), make_set(f, Y)
            mismatches += set(sumset(FX, FY)) != oracles.sumset(X, Y, p)
            mismatches += set(difference(FX, FY)) != oracles.difference(X, Y, p)
            mismatches += set(productset(FX, FY)) != oracles.productset(X, Y, p)
            mismatches += set(dilate(a, FX)) != oracles.dilate(a, X, p)
            mismatches += set(intersect(FX, FY)) != X & Y
        d["mismatches"] = mismatches
        assert mismatches == 0


def test_c02_cauchy_davenport():
    with criterion(2, "Cauchy-Davenport on 1000 pairs per prime", 30) as d:
        rng = np.random.default_rng(202)
        failures = 0
        for p in (7, 101, 257, 1009):
            f = make_field(p)
            for _ in range(1000):
                X, Y = make_set(f, rand_set(rng, p)), make_set(f, rand_set(rng, p))
                failures += sumset(X, Y).size < min(p, X.size + Y.size - 1)
        d["failures"] = failures
        assert failures == 0


def test_c03_ruzsa_and_plunnecke():
    with criterion(3, "Ruzsa triangle and Plunnecke corollary, 10^4 instances each", 60) as d:
        rng = np.random.default_rng(303)
        primes = [5, 7, 11, 13, 31, 101]
        ruzsa_fail = plun_fail = 0
        for i in range(10_000):
            p = primes[i % len(primes)]
            f = make_field(p)
            X, Y, Z = (rand_set(rng, p, size=int(rng.integers(1, min(p, 12) + 1)))
                       for _ in range(3))
            rep = check_ruzsa_triangle(make_set(f, X), make_set(f, Y), make_set(f, Z))
            lhs = len(oracles.difference(X, Z, p))
            rhs = Fraction(len(oracles.difference(X, Y, p)) * len(oracles.difference(Y, Z, p)),
                           len(Y))
            ruzsa_fail += (not rep.holds) or rep.lhs != lhs or rep.rhs != rhs
        for i in range(10_000):
            p = primes[i % len(primes)]
            f = make_field(p)
            k = 1 + i % 4
            X = make_set(f, rand_set(rng, p, size=int(rng.integers(1, min(p, 10) + 1))))
            B = [make_set(f, rand_set(rng, p, size=int(rng.integers(1, min(p, 10) + 1))))
                 for _ in range(k)]
            plun_fail += not check_plunnecke(X, B).holds
        d["ruzsa_failures"], d["plunnecke_failures"] = ruzsa_fail, plun_fail
        assert ruzsa_fail == 0 and plun_fail == 0


def test_c04_counting_equivalence(monkeypatch):
    parseval_worst = [0.0]
    calls = [0]
    real = counting.power_spectrum

    def audited(X):
        ps = real(X)
        calls[0] += 1
        want = X.p * X.size
        parseval_worst[0] = max(parseval_worst[0], abs(float(ps.sum()) - want) / want)
        return ps

    monkeypatch.setattr(counting, "power_spectrum", audited)
    with criterion(4, "I by enumeration / per-slope histogram / spectral agree (100 cases)",
                   60) as d:
        rng = np.random.default_rng(404)
        primes = [p for p in range(3, 258) if is_prime(p)]
        disagreements = 0
        for _ in range(100):
            p = int(rng.choice(primes))
            f = make_field(p)
            X = make_set(f, rand_set(rng, p, size=int(rng.integers(1, min(p, 20) + 1))))
            Y = make_set(f, rand_set(rng, p, size=int(rng.integers(1, min(p, 20) + 1))))
            G = make_set(f, rand_set(rng, p, size=int(rng.integers(1, min(p, 10) + 1))))
            values = {m: solution_count_I(X, Y, G, method=m).value
                      for m in ("direct", "per-slope-histogram", "spectral-check")}
            disagreements += len(set(values.values())) != 1
        d["disagreements"] = disagreements
        d["spectrum_calls"] = calls[0]
        d["worst_parseval_rel"] = f"{parseval_worst[0]:.1e}"
        assert disagreements == 0
        assert calls[0] >= 200 and parseval_worst[0] <= 1e-9


def test_c05_energy_bound():
    with criterion(5, "J >= ceil(|A|^4/|AA|) on 500 sets; equality on {1,2,4} mod 7", 30) as d:
        rng = np.random.default_rng(505)
        failures = 0
        for i in range(500):
            p = (101, 257, 1009)[i % 3]
            f = make_field(p)
            A = make_set(f, rand_set(rng, p, size=int(rng.integers(1, 60))))
            J = mult_energy_J(A).value
            failures += J < -(-A.size**4 // productset(A, A).size)
        A = make_set(make_field(7), [1, 2, 4])
        J = mult_energy_J(A).value
        equality = J == Fraction(A.size**4, productset(A, A).size) == A.size**3 == 27
        d["failures"], d["J_124"] = failures, J
        assert failures == 0 and equality


def _I0_by_histogram(X, Y, g, p):
    return sum(c * c for c in Counter((x + g * y) % p for x in X for y in Y).values())


def test_c06_slope_lemma_exhaustive():
    with criterion(6, "max |X+xi*Y| >= p|X||Y||G|/(|X||Y||G|+p^2), both modes", 120) as d:
        rng = np.random.default_rng(606)
        failures = 0
        primes = [p for p in range(11, 102) if is_prime(p)]
        for p in primes:
            f = make_field(p)
            for _ in range(200):
                X, Y, G = (rand_set(rng, p, size=int(rng.integers(1, min(p, 12) + 1)))
                           for _ in range(3))
                FX, FY, FG = make_set(f, X), make_set(f, Y), make_set(f, G)
                bound = oracles.xi_bound(p, len(X), len(Y), len(G))
                failures += xi_lower_bound(FX, FY, FG) != bound
                best = max(len(oracles.sumset(X, oracles.dilate(g, Y, p), p)) for g in G)
                rep = find_xi_witness(FX, FY, FG, "direct")
                failures += rep.lhs != best or rep.lhs < bound
                try:
                    pf = find_xi_witness(FX, FY, FG, "proof-following")
                except LemmaViolation:
                    failures += 1
                    continue
                i0 = _I0_by_histogram(X, Y, pf.witness, p)
                cs = Fraction(len(X) ** 2 * len(Y) ** 2, i0)
                failures += not (pf.i0 == i0 and pf.lhs >= cs >= bound)
        d["primes"], d["failures"] = len(primes), failures
        assert failures == 0


def _subgroup(p, d, start=1):
    return gen_family(make_field(p), FamilySpec("multiplicative-subgroup", order=d, start=start))


def test_c07_case2_trace():
    with criterion(7, "trace, p=257 subgroup of order 128 enters case 2, all checks pass",
                   60) as d:
        H = _subgroup(257, 128)
        rec = run_trace(H)
        _cache["trace7"] = rec.to_json()
        names = {c.name.split(":")[0] for c in rec.checks}
        need = {"i", "ii", "iii.lower", "iii.upper", "iv", "v.plus", "v.minus", "vi'", "vii'",
                "ix", "x"}
        final = next(c for c in rec.checks if c.name.startswith("vii'"))
        d["branch"], d["A1"], d["N"] = rec.branch, rec.A1.size, rec.N
        d["checks"] = f"{sum(c.passed for c in rec.checks)}/{len(rec.checks)}"
        assert rec.branch == "case2" and rec.A1.size == 128 and rec.N == 128
        assert need <= names and rec.passed
        assert final.lhs == Fraction(sumset(H, H).size) ** 8
        assert final.rhs == Fraction(257 * 128**3 * 128**4, 2)


def _case1_candidates(p: int, seed: int = 8):
    rng = np.random.default_rng(mix_seed(seed, p))
    for d in divisors(p - 1):
        if not 8 <= d <= p // 4:
            continue
        for k in (1, 2, 3, 4, 6):
            if d * k > p // 2:
                continue
            starts = [1] + rng.choice(np.arange(2, p), k - 1, replace=False).tolist()
            yield FamilySpec("union", parts=tuple(
                FamilySpec("multiplicative-subgroup", order=d, start=s) for s in starts))
            r = int(rng.integers(2, p))
            yield FamilySpec("union", parts=tuple(
                FamilySpec("multiplicative-subgroup", order=d, start=pow(r, i, p))
                for i in range(k)))
    for n in (16, 32, 64, 128, 256):
        yield FamilySpec("gp", size=n)
        yield FamilySpec("union", parts=(FamilySpec("gp", size=n),
                                         FamilySpec("gp", size=n, start=int(rng.integers(2, p)))))


def test_c08_case1_chain():
    with criterion(8, "case 1 chain: seeded search, else 50 constructed pairs", 300) as d:
        entered, failures, nontrivial_pool = 0, 0, []
        min_ratio = math.inf
        for p in (1009, 2003, 4099):
            f = make_field(p)
            for spec in _case1_candidates(p):
                A = gen_family(f, spec)
                rec = run_trace(A)
                if rec.branch == "trivial":
                    continue
                nontrivial_pool.append(A)
                min_ratio = min(min_ratio, rec.A1.size**2 / p)
                if rec.branch == "case1":
                    entered += 1
                    failures += not rec.passed
        d["nontrivial_searched"] = len(nontrivial_pool)
        d["case1_entered"] = entered
        d["min_A1sq_over_p"] = f"{min_ratio:.2f}"
        if entered == 0:
            rng = np.random.default_rng(808)
            pairs = 0
            for i in range(50):
                A = nontrivial_pool[i * len(nontrivial_pool) // 50]
                cap = math.isqrt(A.p - 1)
                m = int(rng.integers(2, min(cap, A.size) + 1))
                A1 = make_set(A.field, rng.choice(A.elements, m, replace=False))
                assert A1.size ** 2 < A.p
                wit, checks = case1_chain(A, A1, seed=i)
                names = {c.name.split(":")[0] for c in checks}
                assert {"vi", "vii", "viii"} <= names
                failures += not all(c.passed for c in checks)
                pairs += 1
            d["fallback_pairs"] = pairs
        d["failures"] = failures
        assert failures == 0


def _sweep9_config() -> ExperimentConfig:
    sizes = {}
    for p in (101, 1009, 4099):
        top = int(round(p ** (2 / 3)))
        while top**3 > p**2:
            top -= 1
        sizes[p] = sorted({int(s) for s in np.geomspace(8, top, 6)})
    return ExperimentConfig(
        primes=[101, 1009, 4099],
        families=[FamilySpec("random"), FamilySpec("interval"),
                  FamilySpec("geometric-progression"), FamilySpec("multiplicative-subgroup")],
        sizes=sizes, trials=5, master_seed=9, emit_trace=True)


def test_c09_ratio_sweep():
    with criterion(9, "ratio sweep emits well-formed CSV with finite positive ratios", 300) as d:
        text = rows_to_csv(run_sweep(_sweep9_config()))
        _cache["sweep9"] = text
        table = list(csv.DictReader(io.StringIO(text)))
        assert table and list(table[0]) == text.splitlines()[0].split(",")
        bad = [r for r in table
               if not all(math.isfinite(float(r[c])) and float(r[c]) > 0
                          for c in ("ratio_thm1", "ratio_thm2"))]
        assert all(r["branch"] != "error" and r["trace_pass"] == "true" for r in table)
        by_family = {}
        for r in table:
            if r["p"] == "1009":
                by_family.setdefault(r["family"], []).append(float(r["ratio_thm1"]))
        best = {k: min(v) for k, v in by_family.items()}
        d["rows"] = len(table)
        d["bad_ratios"] = len(bad)
        d["p1009_min_ratio_thm1"] = ", ".join(f"{k}:{v:.3f}" for k, v in sorted(best.items()))
        d["subgroup_minimal"] = min(best, key=best.get) == "multiplicative-subgroup"
        assert not bad


def test_c10_performance():
    with criterion(10, "sumset |A|=10^4 < 2s and trace |A|=2000 < 5min near p=10^6", 300) as d:
        p = 1_000_001
        while not is_prime(p):
            p += 2000        # keeps 2000 | p - 1
        f = make_field(p)
        rng = np.random.default_rng(1010)
        A = make_set(f, rng.choice(p, 10_000, replace=False))
        t0 = time.perf_counter()
        S = sumset(A, A)
        t_sum = time.perf_counter() - t0
        d["p"], d["sumset_s"] = p, f"{t_sum:.2f}"
        assert t_sum < 2 and S.size > 10_000
        t0 = time.perf_counter()
        rec_rand = run_trace(make_set(f, rng.choice(np.arange(1, p), 2000, replace=False)))
        rec_sub = run_trace(_subgroup(p, 2000))
        t_trace = time.perf_counter() - t0
        d["trace_s"] = f"{t_trace:.2f}"
        d["branches"] = f"{rec_rand.branch}/{rec_sub.branch}"
        assert t_trace < 300 and rec_rand.passed and rec_sub.passed
        assert rec_sub.branch != "trivial"


def test_c11_determinism():
    with criterion(11, "criteria 7 and 9 rerun byte-identically", 300) as d:
        trace_a = _cache.get("trace7") or run_trace(_subgroup(257, 128)).to_json()
        sweep_a = _cache.get("sweep9") or rows_to_csv(run_sweep(_sweep9_config()))
        trace_b = run_trace(_subgroup(257, 128)).to_json()
        sweep_b = rows_to_csv(run_sweep(_sweep9_config()))
        d["trace_identical"] = trace_a.encode() == trace_b.encode()
        d["csv_identical"] = sweep_a.encode() == sweep_b.encode()
        assert trace_a.encode() == trace_b.encode() and sweep_a.encode() == sweep_b.encode()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
