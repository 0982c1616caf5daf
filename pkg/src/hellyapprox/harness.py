"""Bound sweeps: empirical radii and sample norms against the closed-form bounds.

Each row of a sweep is one instance at one ``k``.  Randomness for row
``(k, i)`` comes only from ``derive_seed(seed, k, i)``, rows run in a thread
pool of ``HELLY_THREADS`` workers, and output is ordered by ``k`` and then
instance index, so results do not depend on the thread count.
"""

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .caratheodory import maurey_sample
from .counterexample import a_k, build_linf_counterexample
from .helly import euclidean_bound, minimize_max_distance, upper_bound
from .instances import generate_rainbow_instance, rainbow_sizes, random_cloud
from .normed_space import DEFAULT_LINF_CONSTANT, INF, NormSpec, default_type_exponent, dual_type_estimate, type_constant_tabulated
from .rng import derive_seed

MODES = ("helly_sweep", "maurey_sweep", "counterexample_check")
CSV_FIELDS = ("k", "empirical", "bound", "residual", "ms", "status")


@dataclass
class ExperimentConfig:
    space: NormSpec
    ks: Sequence[int]
    mode: str = "helly_sweep"
    instances: int = 10
    trials: int = 64
    seed: int = 0
    tol: float = 1e-6
    set_size: int = 2
    max_tuples: int = 256
    extra: int = 0
    cloud_size: int = 8
    bound: str = "type"  # or "euclidean" (l_2 only)
    linf_constant: float = DEFAULT_LINF_CONSTANT  # C in T_2(l_inf^n) <= C sqrt(ln n)
    out: Optional[str] = None
    fmt: str = "json"
    timing: bool = True

    def __post_init__(self):
        self.ks = [int(k) for k in self.ks]
        if not self.ks:
            raise ValueError("k range is empty")
        if any(k < 1 for k in self.ks):
            raise ValueError("every k must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.trials < 1 or self.instances < 1:
            raise ValueError("trials and instances must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.bound not in ("type", "euclidean"):
            raise ValueError(f"unknown bound {self.bound!r}")
        if self.bound == "euclidean" and self.space.p != 2:
            raise ValueError("the Euclidean bound needs p = 2")
        if not self.linf_constant > 0:
            raise ValueError("linf_constant must be positive")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")


@dataclass
class SweepRow:
    k: int
    empirical: float
    bound: float
    residual: float
    ms: float
    status: str  # pass | violation | uncertified
    index: int = field(default=0, compare=False)

    def fields(self):
        return {name: getattr(self, name) for name in CSV_FIELDS}


def _status(ok, certified):
    if ok:
        return "pass"
    return "violation" if certified else "uncertified"


def _helly_row(cfg, k, i):
    seed = derive_seed(cfg.seed, k, i)
    sizes = rainbow_sizes(k, cfg.set_size, cfg.max_tuples)
    inst = generate_rainbow_instance(cfg.space, k, sizes, seed, extra=cfg.extra)
    out = minimize_max_distance(inst.family, tol=cfg.tol, seed=seed)
    if cfg.bound == "euclidean":
        bound = euclidean_bound(k)
    else:
        bound = upper_bound(dual_type_estimate(cfg.space, cfg.linf_constant), k)
    # a center at or under the bound settles the row whether or not it is optimal
    ok = out.mean_radius <= bound + cfg.tol
    return out.mean_radius, bound, out.certificate_residual, _status(ok, out.certified)


def _maurey_row(cfg, k, i):
    seed = derive_seed(cfg.seed, k, i)
    cloud = random_cloud(cfg.space, cfg.cloud_size, seed)
    res = maurey_sample(cloud, k, cfg.trials, seed, cfg.space)
    p = default_type_exponent(cfg.space)
    if p is None:
        raise ValueError(f"{cfg.space} has trivial type; no sampling bound applies")
    T = type_constant_tabulated(cfg.space, p, cfg.linf_constant)
    bound = 2.0 * T.constant * k ** (-1.0 + 1.0 / float(p))
    # sample norms are exact, so every row counts as certified
    return res.norm, bound, 0.0, _status(res.norm <= bound + cfg.tol, True)


def _counterexample_row(cfg, k, i):
    inst = build_linf_counterexample(k)
    out = minimize_max_distance(inst.family, tol=cfg.tol)
    bound = a_k(k)
    # here the bound is a lower bound on the radius
    ok = out.objective >= bound - cfg.tol
    return out.objective, bound, out.certificate_residual, _status(ok, out.certified)


_RUNNERS = {"helly_sweep": _helly_row, "maurey_sweep": _maurey_row,
            "counterexample_check": _counterexample_row}


def thread_count():
    raw = os.environ.get("HELLY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"HELLY_THREADS must be an integer, got {raw!r}") from None


def run_sweep(cfg):
    """Run every (k, instance) row; write ``cfg.out`` if set; return the rows."""
    if cfg.mode == "counterexample_check":
        if cfg.space.p != INF:
            raise ValueError("counterexample_check runs in l_inf^{2k}")
        instances = 1  # the construction is deterministic
    else:
        instances = cfg.instances
    runner = _RUNNERS[cfg.mode]
    jobs = [(k, i) for k in cfg.ks for i in range(instances)]

    def work(job):
        k, i = job
        t0 = time.perf_counter()
        emp, bound, res, status = runner(cfg, k, i)
        ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else 0.0
        return SweepRow(k, float(emp), float(bound), float(res), float(ms), status, i)

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(work, jobs))
    rows.sort(key=lambda r: (r.k, r.index))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_rows(rows, cfg.fmt))
    return rows


def exit_code(rows):
    """Nonzero only when a certified row violates its bound."""
    return 1 if any(r.status == "violation" for r in rows) else 0


def format_rows(rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in rows:
            w.writerow([r.k, repr(r.empirical), repr(r.bound), repr(r.residual), repr(r.ms), r.status])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([r.fields() for r in rows], indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_rows(text, fmt):
    """Inverse of :func:`format_rows` (used to compare CSV and JSON output)."""
    if fmt == "csv":
        rd = csv.DictReader(io.StringIO(text))
        return [{"k": int(d["k"]), "empirical": float(d["empirical"]), "bound": float(d["bound"]),
                 "residual": float(d["residual"]), "ms": float(d["ms"]), "status": d["status"]}
                for d in rd]
    return json.loads(text)
