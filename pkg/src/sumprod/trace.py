"""Executable sum-product argument on a concrete set.

:func:`run_trace` walks the whole argument on a set ``A``: the
multiplicative energy, the choice of ``b0``, the dyadic pigeonhole that
produces ``N`` and ``A1``, the Ruzsa-type bounds on ``|a*A ± b0*A|``,
the small-``A1`` and large-``A1`` branches, and the slope-lemma chain.
Each step is recorded as a :class:`Check` with exact rational sides and
an explicit constant.  The headline bounds are only reported, as ratios,
since their implied constants are unspecified.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .counting import all_b0_scores, intersection_sizes, mult_energy_J
from .field_sets import FpSet, dilate, negate, productset, sumset
from .lemmas import (WitnessReport, find_big_witness, find_gk_witness, find_xi_witness,
                     xi_lower_bound)

TRIVIAL_FACTOR = 100

_RELATIONS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


class ZeroInSet(ValueError):
    pass


class IntersectionAnomaly(RuntimeError):
    """Some ``a*A ∩ b0*A`` came out empty, which cannot happen for ``a, b0`` in ``A``."""


def _frac_pair(q) -> list[str]:
    q = Fraction(q)
    return [str(q.numerator), str(q.denominator)]


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str
    passed: bool

    @classmethod
    def make(cls, name: str, lhs, relation: str, rhs) -> "Check":
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        return cls(name, lhs, rhs, relation, _RELATIONS[relation](lhs, rhs))

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": _frac_pair(self.lhs),
                "rhs": _frac_pair(self.rhs), "pass": self.passed,
                "relation": self.relation}


@dataclass(frozen=True)
class BoundValues:
    """Headline lower bounds at implied constant 1, natural logarithm.

    ``his`` is NaN when ``|A|^2 <= p`` (outside the range of that bound).
    """

    thm1: float
    thm2: float
    his: float
    ratio_thm1: float
    ratio_thm2: float
    ratio_his: float

    def to_dict(self) -> dict:
        return {k: (None if math.isnan(v) else v) for k, v in self.__dict__.items()}


def evaluate_theorem_bounds(p: int, A_size: int, sumset_size: int,
                            prodset_size: int) -> BoundValues:
    n = int(A_size)
    if n < 2:
        raise ValueError("bounds need |A| >= 2")
    L = math.log(n)
    thm1 = min(n ** (15 / 14) * max(1.0, n ** (1 / 7) * p ** (-1 / 14)) / L ** (2 / 7),
               n ** (11 / 12) * p ** (1 / 12) / L ** (1 / 3))
    thm2 = min(n ** (5 / 3) * p ** (-1 / 3), n ** (2 / 3) * p ** (1 / 3)) / L ** (1 / 3)
    if n * n <= p:
        his = math.nan
    elif n**10 < p**7:
        his = n ** 1.5 * p ** (-0.25)
    else:
        his = n ** (2 / 3) * p ** (1 / 3)
    top = max(sumset_size, prodset_size)
    return BoundValues(thm1, thm2, his, top / thm1, top / thm2, top / his)


def select_b0(A: FpSet) -> tuple[int, int]:
    """Element ``b0`` maximising ``sum_a |a*A ∩ b0*A|``; ties go to the smallest."""
    if 0 in A:
        raise ZeroInSet("select_b0 requires 0 not in A")
    if A.size == 0:
        raise ValueError("A must be nonempty")
    scores = all_b0_scores(A)
    i = int(np.argmax(scores))
    return int(A.elements[i]), int(scores[i])


def dyadic_partition(A: FpSet, b0: int) -> list[tuple[int, FpSet]]:
    """Classes ``D_j = {a : 2^(j-1) <= |a*A ∩ b0*A| < 2^j}``, ``j = 1..floor(log2|A|)+1``."""
    if 0 in A:
        raise ZeroInSet("dyadic_partition requires 0 not in A")
    sizes = intersection_sizes(b0, A)
    if sizes.size and sizes.min() < 1:
        bad = int(A.elements[int(np.argmin(sizes))])
        raise IntersectionAnomaly(f"|{bad}*A ∩ {b0}*A| = 0")
    js = np.array([int(s).bit_length() for s in sizes.tolist()], dtype=np.int64)
    top = A.size.bit_length()
    return [(j, FpSet._from_indices(A.field, A.elements[js == j])) for j in range(1, top + 1)]


def select_dyadic_class(partition: list[tuple[int, FpSet]]) -> tuple[int, int, FpSet]:
    """Class maximising ``|D_j| 2^j`` (ties to the smallest ``j``) as ``(j0, N, A1)``."""
    if not partition:
        raise ValueError("empty partition")
    j0, A1 = max(partition, key=lambda item: (item[1].size << item[0], -item[0]))
    return j0, 1 << (j0 - 1), A1


@dataclass(frozen=True)
class TraceRecord:
    p: int
    A_size: int
    sumset_size: int
    prodset_size: int
    removed_zero: bool
    branch: str  # "trivial" | "case1" | "case2"
    b0: Optional[int]
    j0: Optional[int]
    N: Optional[int]
    A1: Optional[FpSet]
    witness: Optional[WitnessReport]
    xi_witness: Optional[WitnessReport]
    checks: tuple[Check, ...]
    bound_values: BoundValues

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "A_size": self.A_size,
            "sumset_size": self.sumset_size,
            "prodset_size": self.prodset_size,
            "removed_zero": self.removed_zero,
            "branch": self.branch,
            "b0": self.b0,
            "j0": self.j0,
            "N": self.N,
            "A1": None if self.A1 is None else self.A1.tolist(),
            "witness": None if self.witness is None else self.witness.to_dict(),
            "xi_witness": None if self.xi_witness is None else self.xi_witness.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
            "bound_values": self.bound_values.to_dict(),
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


class _DilateSums:
    """``|a*A ± b0*A|`` memoised on the dilate ``(b0/a)*A``."""

    def __init__(self, A: FpSet, b0: int):
        self.A, self.b0 = A, b0
        self.negA = negate(A)
        self._cache: dict[tuple[int, bytes], int] = {}

    def size(self, a: int, sign: int) -> int:
        # |a*A + s*b0*A| = |A + s*(b0/a)*A|
        A = self.A
        t = dilate(self.b0 * pow(a, -1, A.p), A)
        key = (sign, t.key())
        if key not in self._cache:
            self._cache[key] = sumset(A, t if sign > 0 else negate(t)).size
        return self._cache[key]


def _ruzsa_checks(W: FpSet, A1: FpSet, b0: int, N: int, S2: int,
                  checks: list[Check]) -> tuple[dict[int, int], dict[int, int]]:
    """Append the ``|a*A ± b0*A| <= |A+A|^2/N`` checks; return both size maps."""
    sums = _DilateSums(W, b0)
    cap = Fraction(S2 * S2, N)
    plus = {a: sums.size(a, +1) for a in A1.tolist()}
    minus = {a: sums.size(a, -1) for a in A1.tolist()}
    checks.append(Check.make("v.plus: max |a*A + b0*A| <= |A+A|^2/N",
                             max(plus.values()), "<=", cap))
    checks.append(Check.make("v.minus: max |a*A - b0*A| <= |A+A|^2/N",
                             max(minus.values()), "<=", cap))
    return plus, minus


def _mixed(W: FpSet, wit: WitnessReport, plus, minus) -> tuple[int, Fraction]:
    a1, a2, b1, b2 = wit.witness
    D = (dilate(a1 - a2, W) + dilate(b1 - b2, W)).size
    return D, Fraction(plus[a1] * minus[a2] * plus[b1] * minus[b2], W.size**3)


def _case1_checks(W, A1, N, S2, plus, minus, wit, checks) -> None:
    n = W.size
    D, mixed_rhs = _mixed(W, wit, plus, minus)
    half_sq = Fraction(A1.size**2, 2)
    chain = Fraction(S2 * S2 * D, n * n)
    checks.append(Check.make("vi.witness: |dA+dA+eA| >= |A1|^2/2", wit.lhs, ">=", half_sq))
    checks.append(Check.make("vi.plunnecke3: |dA+dA+eA| <= |A+A|^2 |dA+eA|/|A|^2",
                             wit.lhs, "<=", chain))
    checks.append(Check.make("vi: |A1|^2/2 <= |A+A|^2 |dA+eA|/|A|^2", half_sq, "<=", chain))
    checks.append(Check.make("vii: |dA+eA| <= prod(mixed sums)/|A|^3", D, "<=", mixed_rhs))
    checks.append(Check.make("viii: |A+A|^10 >= |A1|^2 |A|^5 N^4 / 2", S2**10, ">=",
                             half_sq * n**5 * N**4))


def _case2_checks(W, N, S2, plus, minus, wit, checks) -> None:
    n, p = W.size, W.p
    D, mixed_rhs = _mixed(W, wit, plus, minus)
    half_p = Fraction(p, 2)
    checks.append(Check.make("vi'.witness: |dA+eA| >= p/2", D, ">=", half_p))
    checks.append(Check.make("vi'.plunnecke4: |dA+eA| <= prod(mixed sums)/|A|^3",
                             D, "<=", mixed_rhs))
    checks.append(Check.make("vi': p/2 <= prod(mixed sums)/|A|^3", half_p, "<=", mixed_rhs))
    checks.append(Check.make("vii': |A+A|^8 >= p |A|^3 N^4 / 2", S2**8, ">=",
                             half_p * n**3 * N**4))


def case1_chain(A: FpSet, A1: FpSet, *, b0: Optional[int] = None, N: Optional[int] = None,
                seed: int = 0) -> tuple[WitnessReport, list[Check]]:
    """Small-``A1`` chain on an arbitrary pair ``A1 ⊆ A`` with ``|A1|^2 < p``.

    ``b0`` defaults to :func:`select_b0`; ``N`` defaults to the largest power
    of two not exceeding ``min_{a in A1} |a*A ∩ b0*A|``, so that the lower
    half of the dyadic bracket holds by construction.
    """
    if 0 in A:
        raise ZeroInSet("case1_chain requires 0 not in A")
    if not A1.issubset(A):
        raise ValueError("A1 must be a subset of A")
    if b0 is None:
        b0 = select_b0(A)[0]
    overlaps = intersection_sizes(b0, A)[A1.bits[A.elements]]
    if N is None:
        N = 1 << (int(overlaps.min()).bit_length() - 1)
    checks = [Check.make("iii.lower: min |a*A ∩ b0*A| >= N", int(overlaps.min()), ">=", N)]
    S2 = sumset(A, A).size
    plus, minus = _ruzsa_checks(A, A1, b0, N, S2, checks)
    wit = find_gk_witness(A1, A, seed=seed)
    _case1_checks(A, A1, N, S2, plus, minus, wit, checks)
    return wit, checks


def run_trace(A: FpSet, *, seed: int = 0) -> TraceRecord:
    """Run every step of the argument on ``A`` and record the checks.

    Zero is removed first (``removed_zero`` records it); the reported
    sizes and bound values refer to the set as given.
    """
    if A.size < 2:
        raise ValueError("run_trace needs |A| >= 2")
    p = A.p
    s_orig = sumset(A, A).size
    m_orig = productset(A, A).size
    bounds = evaluate_theorem_bounds(p, A.size, s_orig, m_orig)

    removed_zero = 0 in A
    W = FpSet._from_indices(A.field, A.elements[A.elements != 0]) if removed_zero else A
    n = W.size
    S2 = sumset(W, W).size if removed_zero else s_orig
    M2 = productset(W, W).size if removed_zero else m_orig
    checks: list[Check] = []

    def record(kind: str, **extra) -> TraceRecord:
        return TraceRecord(p, A.size, s_orig, m_orig, removed_zero, kind,
                           extra.get("b0"), extra.get("j0"), extra.get("N"),
                           extra.get("A1"), extra.get("witness"),
                           extra.get("xi_witness"), tuple(checks), bounds)

    if n == 0 or n * n < TRIVIAL_FACTOR * M2:
        checks.append(Check.make("trivial: |AA| > |A|^2/100", M2, ">",
                                 Fraction(n * n, TRIVIAL_FACTOR)))
        return record("trivial")

    J = mult_energy_J(W).value
    checks.append(Check.make("i: J >= |A|^4/|AA|", J, ">=", Fraction(n**4, M2)))

    b0, score = select_b0(W)
    checks.append(Check.make("ii: score(b0) >= |A|^3/|AA|", score, ">=", Fraction(n**3, M2)))

    partition = dyadic_partition(W, b0)
    j0, N, A1 = select_dyadic_class(partition)
    overlaps = intersection_sizes(b0, W)[A1.bits[W.elements]]
    checks.append(Check.make("iii.lower: min |a*A ∩ b0*A| >= N", int(overlaps.min()), ">=", N))
    checks.append(Check.make("iii.upper: max |a*A ∩ b0*A| < 2N", int(overlaps.max()), "<", 2 * N))
    L = n.bit_length()
    checks.append(Check.make("iv: N|A1| >= |A|^3/(2(floor(log2|A|)+1)|AA|)",
                             N * A1.size, ">=", Fraction(n**3, 2 * L * M2)))

    plus, minus = _ruzsa_checks(W, A1, b0, N, S2, checks)
    if A1.size * A1.size < p:
        branch = "case1"
        wit = find_gk_witness(A1, W, seed=seed)
        _case1_checks(W, A1, N, S2, plus, minus, wit, checks)
    else:
        branch = "case2"
        wit = find_big_witness(A1, W, seed=seed)
        _case2_checks(W, N, S2, plus, minus, wit, checks)

    X = negate(dilate(b0, W))
    xi_wit = find_xi_witness(X, W, A1, mode="proof-following")
    bound = xi_lower_bound(X, W, A1)
    checks.append(Check.make("lemma5.cs: |X+xi*Y| >= |X|^2|Y|^2/I0", xi_wit.lhs, ">=",
                             Fraction(n**4, xi_wit.i0)))
    checks.append(Check.make("lemma5.i0: I0 <= |X|^2|Y|^2/p + p|X||Y|/|G|", xi_wit.i0, "<=",
                             Fraction(n**4, p) + Fraction(p * n * n, A1.size)))
    checks.append(Check.make("ix: max |a*A - b0*A| >= p|A|^2|A1|/(|A|^2|A1|+p^2)",
                             max(minus.values()), ">=", bound))
    checks.append(Check.make("x: |A+A|^2/N >= p|A|^2|A1|/(|A|^2|A1|+p^2)",
                             Fraction(S2 * S2, N), ">=", bound))
    return record(branch, b0=b0, j0=j0, N=N, A1=A1, witness=wit, xi_witness=xi_wit)
