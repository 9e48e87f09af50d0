"""Exact set arithmetic in the prime field F_p.

Sets are stored as dense membership vectors of length p.  Sumsets are
computed by OR-ing rotations of one operand's bit mask (held as a Python
integer) by every element of the other operand, which keeps the kernel
exact and fast enough for p around 10**6.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

DEFAULT_CAP = 1 << 26

# Deterministic Miller-Rabin bases, valid for all n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class FieldError(ValueError):
    """Raised for invalid moduli, out-of-range residues and mixed fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field of residues modulo a certified prime ``p``."""

    __slots__ = ("p",)

    def __init__(self, p: int, cap: int = DEFAULT_CAP):
        p = int(p)
        if p > cap:
            raise FieldError(f"modulus {p} exceeds cap {cap}")
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def inv(self, a: int) -> int:
        return pow(int(a), -1, self.p)

    def set(self, elems: Iterable[int]) -> "FpSet":
        return make_set(self, elems)

    def full(self) -> "FpSet":
        return FpSet._from_bits(self, np.ones(self.p, dtype=bool))

    def empty(self) -> "FpSet":
        return FpSet._from_bits(self, np.zeros(self.p, dtype=bool))


def make_field(p: int, cap: int = DEFAULT_CAP) -> PrimeField:
    return PrimeField(p, cap)


class FpSet:
    """Immutable subset of F_p.

    Membership is a read-only boolean vector of length p; the cardinality
    is cached at construction.
    """

    __slots__ = ("field", "_bits", "size", "_mask", "_elems")

    def __init__(self, *args, **kwargs):
        raise TypeError("use make_set() or PrimeField.set() to build an FpSet")

    @classmethod
    def _from_bits(cls, field: PrimeField, bits: np.ndarray) -> "FpSet":
        obj = object.__new__(cls)
        bits = np.ascontiguousarray(bits, dtype=bool)
        bits.setflags(write=False)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "_bits", bits)
        object.__setattr__(obj, "size", int(np.count_nonzero(bits)))
        object.__setattr__(obj, "_mask", None)
        object.__setattr__(obj, "_elems", None)
        return obj

    @classmethod
    def _from_indices(cls, field: PrimeField, idx: np.ndarray) -> "FpSet":
        bits = np.zeros(field.p, dtype=bool)
        bits[idx] = True
        return cls._from_bits(field, bits)

    def __setattr__(self, name, value):
        raise AttributeError("FpSet is immutable")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def elements(self) -> np.ndarray:
        """Members in ascending order as an int64 array."""
        if self._elems is None:
            e = np.flatnonzero(self._bits).astype(np.int64)
            e.setflags(write=False)
            object.__setattr__(self, "_elems", e)
        return self._elems

    @property
    def mask(self) -> int:
        """Membership as a Python integer; bit x set iff x is a member."""
        if self._mask is None:
            raw = np.packbits(self._bits, bitorder="little").tobytes()
            object.__setattr__(self, "_mask", int.from_bytes(raw, "little"))
        return self._mask

    def tolist(self) -> list[int]:
        return self.elements.tolist()

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.tolist())

    def __contains__(self, x) -> bool:
        x = int(x)
        return 0 <= x < self.p and bool(self._bits[x])

    def __eq__(self, other):
        if not isinstance(other, FpSet):
            return NotImplemented
        return self.field == other.field and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.p, self.elements.tobytes()))

    def __repr__(self):
        body = self.tolist()
        if len(body) > 12:
            shown = ", ".join(map(str, body[:12])) + ", ..."
        else:
            shown = ", ".join(map(str, body))
        return f"FpSet(p={self.p}, size={self.size}, {{{shown}}})"

    def key(self) -> bytes:
        """Content key suitable for memoising results keyed on the set."""
        return self.p.to_bytes(8, "little") + self.elements.tobytes()

    def issubset(self, other: "FpSet") -> bool:
        _same_field(self, other)
        return not np.any(self._bits & ~other._bits)

    def __add__(self, other):
        return sumset(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __mul__(self, other):
        return productset(self, other)

    def __neg__(self):
        return negate(self)

    def __and__(self, other):
        return intersect(self, other)

    def __rmul__(self, a):
        # a * X for a scalar a is the dilate, as in the usual notation.
        return dilate(a, self)


def make_set(field: PrimeField, elems: Iterable[int]) -> FpSet:
    """Build a set from residues in ``[0, p)``; duplicates collapse.

    Residues outside ``[0, p)`` raise :class:`FieldError` rather than being
    reduced, so caller mistakes stay visible.
    """
    arr = np.asarray(list(elems) if not isinstance(elems, np.ndarray) else elems)
    if arr.size == 0:
        return field.empty()
    if not np.issubdtype(arr.dtype, np.integer):
        raise FieldError("set elements must be integers")
    arr = arr.astype(np.int64, copy=False)
    bad = (arr < 0) | (arr >= field.p)
    if np.any(bad):
        raise FieldError(f"element {int(arr[bad][0])} outside [0, {field.p})")
    return FpSet._from_indices(field, arr)


def _same_field(X: FpSet, Y: FpSet) -> None:
    if X.field != Y.field:
        raise FieldError(f"field mismatch: p={X.p} vs p={Y.p}")


def _mask_to_set(field: PrimeField, mask: int) -> FpSet:
    p = field.p
    raw = mask.to_bytes((p + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:p]
    return FpSet._from_bits(field, bits.astype(bool))


def sumset(X: FpSet, Y: FpSet) -> FpSet:
    """``X + Y = {x + y mod p}``."""
    _same_field(X, Y)
    f = X.field
    if X.size == 0 or Y.size == 0:
        return f.empty()
    if X.size < Y.size:
        X, Y = Y, X
    # Rotate the larger operand by each element of the smaller one.  Shifts
    # land in [0, 2p - 1); folding the high half back gives the cyclic sum.
    p = f.p
    m = X.mask
    acc = 0
    for s in Y.elements.tolist():
        acc |= m << s
    folded = (acc & ((1 << p) - 1)) | (acc >> p)
    return _mask_to_set(f, folded)


def negate(X: FpSet) -> FpSet:
    """``-X = {-x mod p}``."""
    if X.size == 0:
        return X
    return FpSet._from_indices(X.field, (-X.elements) % X.p)


def difference(X: FpSet, Y: FpSet) -> FpSet:
    """``X - Y = {x - y mod p}``."""
    _same_field(X, Y)
    return sumset(X, negate(Y))


def dilate(a: int, X: FpSet) -> FpSet:
    """``a*X = {a x mod p}``; ``a`` is reduced mod p (0 gives ``{0}``)."""
    p = X.p
    a = int(a) % p
    if X.size == 0:
        return X
    return FpSet._from_indices(X.field, (X.elements * a) % p)


def intersect(X: FpSet, Y: FpSet) -> FpSet:
    _same_field(X, Y)
    return FpSet._from_bits(X.field, X.bits & Y.bits)


def productset(X: FpSet, Y: FpSet) -> FpSet:
    """``XY = {x y mod p}`` by blocked pairwise enumeration.

    Stops early once the result covers every residue it possibly can
    (all of F_p if 0 is in X or Y, otherwise F_p minus zero).
    """
    _same_field(X, Y)
    f = X.field
    p = f.p
    if X.size == 0 or Y.size == 0:
        return f.empty()
    if X.size > Y.size:
        X, Y = Y, X
    target = p if (0 in X or 0 in Y) else p - 1
    out = np.zeros(p, dtype=bool)
    ys = Y.elements
    xs = X.elements
    block = max(1, (1 << 20) // max(1, ys.size))
    for start in range(0, xs.size, block):
        chunk = xs[start:start + block]
        out[(np.multiply.outer(chunk, ys) % p).ravel()] = True
        if np.count_nonzero(out) >= target:
            break
    return FpSet._from_bits(f, out)


def kfold_sumset(sets: list[FpSet]) -> FpSet:
    """``B_1 + ... + B_k`` folded left to right."""
    if not sets:
        raise ValueError("need at least one set")
    acc = sets[0]
    for B in sets[1:]:
        acc = sumset(acc, B)
    return acc


# ---------- set file text format

def format_set(X: FpSet) -> str:
    """Render ``p=<p>`` then the ascending comma-separated residues."""
    return f"p={X.p}\n" + ",".join(map(str, X.tolist())) + "\n"


def parse_set(text: str, cap: int = DEFAULT_CAP) -> FpSet:
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("p="):
        raise FieldError("set file must start with a 'p=<integer>' line")
    try:
        p = int(lines[0].strip()[2:])
    except ValueError as exc:
        raise FieldError(f"bad modulus line {lines[0]!r}") from exc
    field = make_field(p, cap)
    body = lines[1].strip() if len(lines) > 1 else ""
    if not body:
        return field.empty()
    try:
        elems = [int(tok) for tok in body.split(",")]
    except ValueError as exc:
        raise FieldError(f"bad residue list {body!r}") from exc
    return make_set(field, elems)


def read_set(path, cap: int = DEFAULT_CAP) -> FpSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_set(fh.read(), cap)


def write_set(X: FpSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_set(X))
