"""Witness searches and inequality predicates for the sum-product lemmas.

Every comparison is carried out with exact integers or
:class:`fractions.Fraction`; no bound is ever compared in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .counting import min_I0_slope
from .field_sets import FpSet, _same_field, dilate, kfold_sumset, sumset

EXHAUSTIVE_LIMIT = 48
DEFAULT_BUDGET = 100_000


class HypothesisViolation(ValueError):
    """Inputs do not satisfy the size hypothesis of the requested lemma."""


class WitnessNotFound(RuntimeError):
    """No witness turned up within the search budget."""


class LemmaViolation(AssertionError):
    """A proven inequality came out false; this always indicates a bug."""


def _frac_pair(q) -> list[str]:
    q = Fraction(q)
    return [str(q.numerator), str(q.denominator)]


@dataclass(frozen=True)
class InequalityReport:
    """``lhs <= rhs`` together with both sides."""

    lhs: Fraction
    rhs: Fraction
    holds: bool

    def to_dict(self) -> dict:
        return {"lhs": _frac_pair(self.lhs), "rhs": _frac_pair(self.rhs),
                "holds": self.holds}


@dataclass(frozen=True)
class WitnessReport:
    witness: Union[tuple[int, int, int, int], int]
    lhs: int
    rhs: Fraction
    search_mode: str  # "exhaustive" | "sampled"
    samples_used: int
    # Minimal per-slope count, set by the proof-following slope search.
    i0: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs

    def to_dict(self) -> dict:
        w = list(self.witness) if isinstance(self.witness, tuple) else self.witness
        out = {
            "witness": w,
            "lhs": self.lhs,
            "rhs": _frac_pair(self.rhs),
            "search_mode": self.search_mode,
            "samples_used": self.samples_used,
        }
        if self.i0 is not None:
            out["i0"] = self.i0
        return out


# ---------- Ruzsa-type predicates

def check_ruzsa_triangle(X: FpSet, Y: FpSet, Z: FpSet) -> InequalityReport:
    """``|X - Z| <= |X - Y| |Y - Z| / |Y|``."""
    _same_field(X, Y)
    _same_field(Y, Z)
    if Y.size == 0:
        raise ValueError("Y must be nonempty")
    lhs = Fraction((X - Z).size)
    rhs = Fraction((X - Y).size * (Y - Z).size, Y.size)
    return InequalityReport(lhs, rhs, lhs <= rhs)


def check_plunnecke(X: FpSet, B: Sequence[FpSet]) -> InequalityReport:
    """``|B_1 + ... + B_k| <= prod |X + B_i| / |X|^(k-1)``."""
    if X.size == 0:
        raise ValueError("X must be nonempty")
    if len(B) == 0:
        raise ValueError("need k >= 1 summands")
    for Bi in B:
        _same_field(X, Bi)
    lhs = Fraction(kfold_sumset(list(B)).size)
    num = 1
    for Bi in B:
        num *= (X + Bi).size
    rhs = Fraction(num, X.size ** (len(B) - 1))
    return InequalityReport(lhs, rhs, lhs <= rhs)


# ---------- quadruple witness searches

def _quadruple_search(A1: FpSet, value_of_ratio, target: Fraction,
                      seed: int, budget: int, exhaustive_limit: int):
    """Find ``(a1, a2, b1, b2)`` in ``A1^4``, ``a1 != a2``, whose value reaches target.

    ``value_of_ratio(lam)`` receives ``lam = (b1 - b2) / (a1 - a2)``; the
    lemma cardinalities depend on the quadruple only through this ratio.
    """
    p = A1.p
    elems = A1.tolist()
    cache: dict[int, int] = {}

    def value(a1, a2, b1, b2):
        lam = (b1 - b2) * pow(a1 - a2, -1, p) % p
        if lam not in cache:
            cache[lam] = value_of_ratio(lam)
        return cache[lam]

    examined = 0
    if len(elems) <= exhaustive_limit:
        for a1 in elems:
            for a2 in elems:
                if a1 == a2:
                    continue
                for b1 in elems:
                    for b2 in elems:
                        examined += 1
                        if value(a1, a2, b1, b2) >= target:
                            return (a1, a2, b1, b2), "exhaustive", examined
        return None, "exhaustive", examined

    rng = np.random.default_rng(seed)
    arr = np.asarray(elems, dtype=np.int64)
    while examined < budget:
        batch = rng.integers(0, arr.size, size=(min(4096, budget - examined), 4))
        for row in batch.tolist():
            examined += 1
            a1, a2, b1, b2 = (int(arr[i]) for i in row)
            if a1 == a2:
                continue
            if value(a1, a2, b1, b2) >= target:
                return (a1, a2, b1, b2), "sampled", examined
    return None, "sampled", examined


def _check_ambient(A1: FpSet, ambient: FpSet) -> None:
    _same_field(A1, ambient)
    if not A1.issubset(ambient):
        raise HypothesisViolation("A1 must be a subset of the ambient set")


def gk_cardinality(quad: Sequence[int], S: FpSet) -> int:
    """``|(a1-a2)*S + (a1-a2)*S + (b1-b2)*S|`` computed from scratch."""
    a1, a2, b1, b2 = (int(v) for v in quad)
    d = dilate(a1 - a2, S)
    return (d + d + dilate(b1 - b2, S)).size


def big_cardinality(quad: Sequence[int], S: FpSet) -> int:
    """``|(a1-a2)*S + (b1-b2)*S|`` computed from scratch."""
    a1, a2, b1, b2 = (int(v) for v in quad)
    return (dilate(a1 - a2, S) + dilate(b1 - b2, S)).size


def find_gk_witness(A1: FpSet, ambient: Optional[FpSet] = None, *, seed: int = 0,
                    budget: int = DEFAULT_BUDGET,
                    exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> WitnessReport:
    """Quadruple with ``|(a1-a2)*S + (a1-a2)*S + (b1-b2)*S| >= |A1|^2 / 2``.

    ``S`` is ``ambient`` (default ``A1``).  Requires ``1 < |A1|`` and
    ``|A1|^2 < p``.  Small ``A1`` are searched exhaustively in
    lexicographic order, larger ones by seeded uniform sampling.
    """
    S = A1 if ambient is None else ambient
    _check_ambient(A1, S)
    n, p = A1.size, A1.p
    if n <= 1 or n * n >= p:
        raise HypothesisViolation(f"need 1 < |A1| and |A1|^2 < p, got |A1|={n}, p={p}")
    target = Fraction(n * n, 2)
    SS = S + S
    quad, mode, used = _quadruple_search(
        A1, lambda lam: (SS + dilate(lam, S)).size, target, seed, budget, exhaustive_limit)
    if quad is None:
        raise WitnessNotFound(f"no witness among {used} quadruples ({mode})")
    lhs = gk_cardinality(quad, S)
    if lhs < target:
        raise LemmaViolation(f"witness {quad} re-evaluates to {lhs} < {target}")
    return WitnessReport(quad, lhs, target, mode, used)


def find_big_witness(A1: FpSet, ambient: Optional[FpSet] = None, *, seed: int = 0,
                     budget: int = DEFAULT_BUDGET,
                     exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> WitnessReport:
    """Quadruple with ``|(a1-a2)*S + (b1-b2)*S| >= p / 2``; needs ``|A1|^2 > p``."""
    S = A1 if ambient is None else ambient
    _check_ambient(A1, S)
    n, p = A1.size, A1.p
    if n * n <= p or n < 2:
        raise HypothesisViolation(f"need |A1|^2 > p, got |A1|={n}, p={p}")
    target = Fraction(p, 2)
    quad, mode, used = _quadruple_search(
        A1, lambda lam: (S + dilate(lam, S)).size, target, seed, budget, exhaustive_limit)
    if quad is None:
        raise WitnessNotFound(f"no witness among {used} quadruples ({mode}, budget {budget})")
    lhs = big_cardinality(quad, S)
    if lhs < target:
        raise LemmaViolation(f"witness {quad} re-evaluates to {lhs} < {target}")
    return WitnessReport(quad, lhs, target, mode, used)


# ---------- slope lemma

def xi_lower_bound(X: FpSet, Y: FpSet, G: FpSet) -> Fraction:
    """``p |X||Y||G| / (|X||Y||G| + p^2)``."""
    _same_field(X, Y)
    _same_field(X, G)
    p = X.p
    n = X.size * Y.size * G.size
    return Fraction(p * n, n + p * p)


def find_xi_witness(X: FpSet, Y: FpSet, G: FpSet, mode: str = "direct") -> WitnessReport:
    """Slope ``xi`` in ``G`` with ``|X + xi*Y|`` at least the slope lower bound.

    ``"direct"`` maximises ``|X + xi*Y|`` over ``G``.  ``"proof-following"``
    takes the slope with the fewest solutions of ``x + xi y = x1 + xi y1``
    and also confirms ``|X + xi*Y| >= |X|^2 |Y|^2 / I_0``.  Ties go to the
    smallest residue in both modes.
    """
    _same_field(X, Y)
    _same_field(X, G)
    if X.size == 0 or Y.size == 0 or G.size == 0:
        raise ValueError("X, Y and G must be nonempty")
    bound = xi_lower_bound(X, Y, G)
    i0 = None
    if mode == "direct":
        cache: dict[bytes, int] = {}
        best_xi, best = None, -1
        for g in G.tolist():
            gY = dilate(g, Y)
            key = gY.key()
            if key not in cache:
                cache[key] = sumset(X, gY).size
            if cache[key] > best:
                best_xi, best = g, cache[key]
        xi, lhs = best_xi, best
        used = G.size
    elif mode == "proof-following":
        xi, i0 = min_I0_slope(X, Y, G)
        lhs = sumset(X, dilate(xi, Y)).size
        used = G.size
        cs = Fraction(X.size**2 * Y.size**2, i0)
        if not lhs >= cs >= bound:
            raise LemmaViolation(f"chain failed: |X+xi*Y|={lhs}, CS={cs}, bound={bound}")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if lhs < bound:
        raise LemmaViolation(f"|X+{xi}*Y|={lhs} below {bound}")
    return WitnessReport(int(xi), int(lhs), bound, "exhaustive", used, i0)
