"""Deterministic generators for test sets in F_p."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .field_sets import FpSet, PrimeField, make_set

KINDS = ("random", "interval", "arithmetic-progression", "geometric-progression",
         "multiplicative-subgroup", "union")

_ALIASES = {"ap": "arithmetic-progression", "gp": "geometric-progression",
            "subgroup": "multiplicative-subgroup"}

MASK64 = (1 << 64) - 1


class FamilyError(ValueError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed with chained splitmix64."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod ``p``."""
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise FamilyError("0 has no multiplicative order")
    order = p - 1
    for q, e in factorize(p - 1).items():
        for _ in range(e):
            if pow(a, order // q, p) == 1:
                order //= q
            else:
                break
    return order


@dataclass(frozen=True)
class FamilySpec:
    """A set family and its parameters.

    ``size`` is used by every kind except ``multiplicative-subgroup`` (which
    uses ``order``) and ``union`` (whose members are listed in ``parts``).
    Geometric progressions default to the smallest primitive root as ratio.
    """

    kind: str
    size: Optional[int] = None
    start: int = 1
    step: int = 1
    ratio: Optional[int] = None
    order: Optional[int] = None
    seed: int = 0
    parts: tuple["FamilySpec", ...] = ()
    name: Optional[str] = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "parts", tuple(
            p if isinstance(p, FamilySpec) else FamilySpec.from_dict(p) for p in self.parts))

    @property
    def label(self) -> str:
        return self.name or self.kind

    def with_size(self, size: int) -> "FamilySpec":
        if self.kind == "multiplicative-subgroup":
            return _replace(self, order=size)
        if self.kind == "union":
            return self
        return _replace(self, size=size)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for f in fields(self):
            if f.name == "kind":
                continue
            v = getattr(self, f.name)
            if f.name == "parts":
                if v:
                    out["parts"] = [p.to_dict() for p in v]
            elif v != f.default:
                out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise FamilyError(f"unknown family fields {sorted(unknown)}")
        d = dict(d)
        d["parts"] = tuple(cls.from_dict(p) for p in d.get("parts", ()))
        return cls(**d)


def _replace(spec: FamilySpec, **changes) -> FamilySpec:
    d = {f.name: getattr(spec, f.name) for f in fields(spec)}
    d.update(changes)
    return FamilySpec(**d)


def _need_size(spec: FamilySpec, p: int) -> int:
    if spec.size is None:
        raise FamilyError(f"{spec.kind} family needs a size")
    if spec.size < 0:
        raise FamilyError("size must be non-negative")
    if spec.size > p:
        raise FamilyError(f"size {spec.size} exceeds p={p}")
    return spec.size


def gen_family(f: PrimeField, spec: FamilySpec) -> FpSet:
    p = f.p
    kind = spec.kind
    if kind == "random":
        n = _need_size(spec, p)
        rng = np.random.default_rng(spec.seed & MASK64)
        return make_set(f, rng.choice(p, size=n, replace=False))
    if kind == "interval":
        n = _need_size(spec, p)
        return make_set(f, (spec.start + np.arange(n)) % p)
    if kind == "arithmetic-progression":
        n = _need_size(spec, p)
        if spec.step % p == 0 and n > 1:
            raise FamilyError("progression step must be nonzero mod p")
        return make_set(f, (spec.start + spec.step * np.arange(n, dtype=np.int64)) % p)
    if kind == "geometric-progression":
        n = _need_size(spec, p)
        if spec.start % p == 0:
            raise FamilyError("geometric progression must start at a nonzero residue")
        ratio = primitive_root(p) if spec.ratio is None else spec.ratio % p
        if n > multiplicative_order(ratio, p):
            raise FamilyError(f"ratio {ratio} has order below requested size {n}")
        elems, x = [], spec.start % p
        for _ in range(n):
            elems.append(x)
            x = x * ratio % p
        return make_set(f, elems)
    if kind == "multiplicative-subgroup":
        d = spec.order
        if d is None or d < 1 or (p - 1) % d:
            raise FamilyError(f"subgroup order {d} must divide p-1={p - 1}")
        h = pow(primitive_root(p), (p - 1) // d, p)
        elems, x = [], spec.start % p if spec.start % p else 1
        for _ in range(d):
            elems.append(x)
            x = x * h % p
        return make_set(f, elems)
    if kind == "union":
        if not spec.parts:
            raise FamilyError("union family needs parts")
        bits = np.zeros(p, dtype=bool)
        for part in spec.parts:
            bits |= gen_family(f, part).bits
        return make_set(f, np.flatnonzero(bits))
    raise FamilyError(f"unknown family kind {kind!r}")
