"""Experiment sweeps over primes, set families and sizes."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional, Union

from .families import FamilySpec, divisors, gen_family, mix_seed
from .field_sets import FpSet, is_prime, make_field, productset, sumset
from .trace import TRIVIAL_FACTOR, evaluate_theorem_bounds, run_trace

log = logging.getLogger(__name__)

CSV_COLUMNS = ("p", "family", "size", "trial", "sumset_size", "prodset_size", "max_side",
               "thm1_bound", "thm2_bound", "his_bound", "ratio_thm1", "ratio_thm2",
               "branch", "trace_pass")
_FLOAT_COLUMNS = {"thm1_bound", "thm2_bound", "his_bound", "ratio_thm1", "ratio_thm2"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep description.

    ``sizes`` is either one list used for every prime or a mapping from
    prime (as a string or int) to its own list.
    """

    primes: tuple[int, ...]
    families: tuple[FamilySpec, ...]
    sizes: Union[tuple[int, ...], dict]
    trials: int = 1
    master_seed: int = 0
    emit_trace: bool = False
    output_format: str = "csv"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))
        object.__setattr__(self, "families", tuple(
            f if isinstance(f, FamilySpec) else FamilySpec.from_dict(f) for f in self.families))
        if isinstance(self.sizes, dict):
            object.__setattr__(self, "sizes", {int(k): tuple(int(s) for s in v)
                                               for k, v in self.sizes.items()})
        else:
            object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    def sizes_for(self, p: int) -> tuple[int, ...]:
        if isinstance(self.sizes, dict):
            return self.sizes.get(p, ())
        return self.sizes

    def to_dict(self) -> dict:
        sizes = ({str(k): list(v) for k, v in self.sizes.items()}
                 if isinstance(self.sizes, dict) else list(self.sizes))
        return {
            "primes": list(self.primes),
            "families": [f.to_dict() for f in self.families],
            "sizes": sizes,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "emit_trace": self.emit_trace,
            "output_format": self.output_format,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class ResultRow:
    p: int
    family: str
    size: int
    trial: int
    sumset_size: Optional[int]
    prodset_size: Optional[int]
    max_side: Optional[int]
    thm1_bound: float
    thm2_bound: float
    his_bound: float
    ratio_thm1: float
    ratio_thm2: float
    branch: str
    trace_pass: Optional[bool]
    error: Optional[str] = None

    def to_dict(self) -> dict:
        out = {}
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            out[name] = None if isinstance(v, float) and math.isnan(v) else v
        if self.error is not None:
            out["error"] = self.error
        return out


def _resolve_sizes(spec: FamilySpec, p: int, sizes) -> list[int]:
    if spec.kind == "union":
        return [0]
    if spec.kind != "multiplicative-subgroup":
        return list(sizes)
    # Subgroup orders must divide p - 1: snap down to a divisor, drop repeats.
    divs = divisors(p - 1)
    snapped = []
    for s in sizes:
        cands = [d for d in divs if d <= s]
        if cands and cands[-1] not in snapped:
            snapped.append(cands[-1])
    return snapped


def _measure(task) -> ResultRow:
    p, fam_idx, spec, size, trial, master_seed, emit_trace = task
    label = spec.label
    try:
        f = make_field(p)
        seed = mix_seed(master_seed, fam_idx, trial, p, size)
        A = gen_family(f, _with_seed(spec.with_size(size) if size else spec, seed))
        n = A.size
        s = sumset(A, A).size
        m = productset(A, A).size
        if n >= 2:
            bv = evaluate_theorem_bounds(p, n, s, m)
            values = (bv.thm1, bv.thm2, bv.his, bv.ratio_thm1, bv.ratio_thm2)
        else:
            values = (math.nan,) * 5
        trace_pass = None
        if emit_trace and n >= 2:
            tr = run_trace(A, seed=seed)
            branch, trace_pass = tr.branch, tr.passed
        else:
            W = A if 0 not in A else FpSet._from_indices(f, A.elements[A.elements != 0])
            mz = productset(W, W).size
            branch = "trivial" if W.size**2 < TRIVIAL_FACTOR * mz else "nontrivial"
            if emit_trace:
                trace_pass = False
        return ResultRow(p, label, n, trial, s, m, max(s, m), *values, branch, trace_pass)
    except Exception as exc:  # noqa: BLE001 - one bad row must not sink the sweep
        log.warning("row p=%s family=%s size=%s trial=%s failed: %s", p, label, size, trial, exc)
        return ResultRow(p, label, size, trial, None, None, None, *(math.nan,) * 5,
                         "error", False if emit_trace else None, f"{type(exc).__name__}: {exc}")


def _with_seed(spec: FamilySpec, seed: int) -> FamilySpec:
    if spec.kind == "random":
        d = spec.to_dict()
        d["seed"] = seed
        return FamilySpec.from_dict(d)
    if spec.kind == "union":
        d = spec.to_dict()
        d["parts"] = [_with_seed(part, mix_seed(seed, i)).to_dict()
                      for i, part in enumerate(spec.parts)]
        return FamilySpec.from_dict(d)
    return spec


def _tasks(cfg: ExperimentConfig):
    for p in cfg.primes:
        for fam_idx, spec in enumerate(cfg.families):
            for size in _resolve_sizes(spec, p, cfg.sizes_for(p)):
                for trial in range(cfg.trials):
                    yield (p, fam_idx, spec, size, trial, cfg.master_seed, cfg.emit_trace)


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
    """One row per (prime, family, size, trial), sorted by (family, p, size, trial).

    Row order and seeds do not depend on ``workers``.
    """
    tasks = list(_tasks(cfg))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_measure, tasks, chunksize=4))
    else:
        rows = [_measure(t) for t in tasks]
    keyed = sorted(zip(rows, tasks), key=lambda rt: (rt[0].family, rt[0].p, rt[0].size,
                                                    rt[0].trial, rt[1][1]))
    return [r for r, _ in keyed]


def _fmt(name: str, v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if name in _FLOAT_COLUMNS:
        return "nan" if math.isnan(v) else f"{v:.6f}"
    return str(v)


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(c, getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[ResultRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2) + "\n"


def render(rows: list[ResultRow], fmt: str) -> str:
    if fmt == "csv":
        return rows_to_csv(rows)
    if fmt == "json":
        return rows_to_json(rows)
    raise ValueError(f"unknown output format {fmt!r}")
