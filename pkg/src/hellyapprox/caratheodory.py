"""Sparse averages approximating zero: Maurey sampling and its colorful variant.

Given points ``u_1..u_m`` in the unit ball of a space with type ``p`` and
weights ``lam`` with ``sum lam_j u_j = 0``, averaging ``k`` draws from ``lam``
gives a point of expected norm at most ``2 T_p k^(-1 + 1/p)``.  The samplers
here run independent trials and keep the best one; :func:`brute_force_best_tuple`
is the exact oracle they are tested against.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import rng
from .nearest import nearest_combination
from .normed_space import _pnorm_rows, norms

NORM_SLACK = 1e-9
ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points (rows) with optional simplex weights."""

    points: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        P = np.array(self.points, dtype=float, ndmin=2)
        if P.ndim != 2 or P.shape[0] == 0:
            raise ValueError(f"need a nonempty (m, n) point array, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("points have non-finite coordinates")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        if self.weights is not None:
            w = np.array(self.weights, dtype=float).ravel()
            if w.shape != (P.shape[0],):
                raise ValueError(f"{w.size} weights for {P.shape[0]} points")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
                raise ValueError("weights must be nonnegative and sum to 1")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def anchor(self):
        if self.weights is None:
            raise ValueError("cloud has no weights")
        return self.weights @ self.points

    def check_in_ball(self, space):
        if self.dim != space.dim:
            raise ValueError(f"points have dimension {self.dim}, space {space} has {space.dim}")
        worst = float(norms(self.points, space).max())
        if worst > 1 + NORM_SLACK:
            raise ValueError(f"point of norm {worst:.6g} outside the unit ball of {space}")

    def to_json(self):
        out = {"points": self.points.tolist()}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["points"], obj.get("weights"))


@dataclass(frozen=True, eq=False)
class ColorGroup:
    """One weighted cloud per color; ``anchors[i]`` is the weighted mean of color i."""

    groups: tuple
    anchors: np.ndarray = field(init=False)

    def __post_init__(self):
        groups = tuple(self.groups)
        if not groups:
            raise ValueError("need at least one color")
        if any(g.weights is None for g in groups):
            raise ValueError("every color needs weights")
        if len({g.dim for g in groups}) != 1:
            raise ValueError("colors have different dimensions")
        object.__setattr__(self, "groups", groups)
        A = np.array([g.anchor for g in groups])
        A.setflags(write=False)
        object.__setattr__(self, "anchors", A)

    @property
    def k(self):
        return len(self.groups)

    @property
    def dim(self):
        return self.groups[0].dim

    def to_json(self):
        return {"colors": [g.to_json() for g in self.groups]}

    @classmethod
    def from_json(cls, obj):
        return cls([PointCloud.from_json(g) for g in obj["colors"]])


@dataclass
class MaureyResult:
    indices: List[int]
    average: np.ndarray
    norm: float
    trials_used: int
    seed: Optional[int]


@dataclass
class ZeroWeights:
    """Outcome of :func:`weights_for_zero`.

    ``residual`` is ``||sum lam_j u_j||`` for the returned weights and
    ``lower`` a certified lower bound on the minimum over the simplex.
    """

    weights: np.ndarray
    residual: float
    lower: float
    feasible: bool


def weights_for_zero(points, space, tol=1e-9):
    """Simplex weights putting the weighted mean of ``points`` at zero, if any.

    Infeasibility is a normal outcome: ``feasible`` is False and ``lower``
    certifies that no weights do better than ``lower``.
    """
    P = np.array(points, dtype=float, ndmin=2)
    if P.shape[0] == 0:
        raise ValueError("need at least one point")
    if P.shape[1] != space.dim:
        raise ValueError(f"points have dimension {P.shape[1]}, space {space} has {space.dim}")
    res = nearest_combination([P], space.p, tol=tol, zero_tol=tol)
    return ZeroWeights(res.weights[0], res.value, res.lower, res.value <= tol)


def _average(P, idx, p):
    # sorting first makes equal multisets give bit-identical averages
    avg = P[np.sort(idx)].sum(axis=0) / len(idx)
    return avg, float(_pnorm_rows(avg, p))


def _greedy(P, k, p):
    """Frank-Wolfe vertex trace: each step adds the point most opposed to the running sum."""
    nrm = _pnorm_rows(P, p)
    idx = [int(np.argmin(nrm))]
    total = P[idx[0]].copy()
    for _ in range(1, k):
        if not np.any(total):
            j = int(np.argmin(nrm))
        else:
            a = np.abs(total) / np.abs(total).max()
            if p == math.inf:
                phi = np.where(a == 1.0, np.sign(total), 0.0)
            elif p == 1:
                phi = np.sign(total)
            else:
                phi = np.sign(total) * a ** (float(p) - 1.0)
            j = int(np.argmin(P @ phi))
        idx.append(j)
        total += P[j]
    return idx


def maurey_sample(cloud, k, trials, seed, space, tol=1e-9, strategy="random"):
    """Best of ``trials`` Maurey averages of ``k`` i.i.d. draws from the cloud weights.

    Trial ``t`` reads only its own random stream, so the result for ``T``
    trials is a prefix of the result for more trials (best norm is
    nonincreasing in ``trials``).  Ties go to the lowest trial number.

    ``strategy="greedy"`` replaces sampling by a deterministic Frank-Wolfe
    vertex trace (one "trial").
    """
    if cloud.weights is None:
        raise ValueError("maurey_sample needs cloud weights")
    if k < 1 or trials < 1:
        raise ValueError("k and trials must be positive")
    cloud.check_in_ball(space)
    P, p = cloud.points, space.p
    residual = float(_pnorm_rows(cloud.anchor, p))
    if residual > tol:
        raise ValueError(f"weighted mean has norm {residual:.3g} > tol; 0 is not the cloud's barycenter")
    if strategy == "greedy":
        idx = _greedy(P, k, p)
        avg, nrm = _average(P, np.array(idx), p)
        return MaureyResult(idx, avg, nrm, 1, None)
    if strategy != "random":
        raise ValueError(f"unknown strategy {strategy!r}")
    w = cloud.weights
    best = None
    for t in range(trials):
        idx = rng.stream(seed, rng.MAUREY, t).choice(len(w), size=k, p=w)
        avg, nrm = _average(P, idx, p)
        if best is None or nrm < best[2]:
            best = (idx, avg, nrm)
    idx, avg, nrm = best
    return MaureyResult([int(i) for i in idx], avg, nrm, trials, seed)


def colorful_maurey_sample(group, trials, seed, space, tol=1e-9):
    """Best of ``trials`` colorful averages ``(1/k) sum_i u_{i, t_i}``.

    In each trial color ``i`` draws ``t_i`` from its own weights using the
    stream addressed by (trial, color), independent of evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    for g in group.groups:
        g.check_in_ball(space)
    p = space.p
    drift = float(_pnorm_rows(group.anchors.sum(axis=0), p))
    if drift > tol:
        raise ValueError(f"anchors sum to a vector of norm {drift:.3g} > tol")
    k = group.k
    best = None
    for t in range(trials):
        idx = [int(rng.stream(seed, rng.COLORFUL, t, c).choice(len(g), p=g.weights))
               for c, g in enumerate(group.groups)]
        avg = _colorful_average(group, idx)
        nrm = float(_pnorm_rows(avg, p))
        if best is None or nrm < best[2]:
            best = (idx, avg, nrm)
    idx, avg, nrm = best
    return MaureyResult(idx, avg, nrm, trials, seed)


def _colorful_average(group, idx):
    return np.array([g.points[j] for g, j in zip(group.groups, idx)]).sum(axis=0) / group.k


def brute_force_best_tuple(source, space, k=None):
    """Exact minimum of the average norm over all selections.

    For a :class:`PointCloud`, over multisets of size ``k``; for a
    :class:`ColorGroup`, over one index per color (``k`` is the number of
    colors).  Ties go to the first selection in enumeration order.
    """
    p = space.p
    if isinstance(source, ColorGroup):
        sizes = [len(g) for g in source.groups]
        if math.prod(sizes) > ENUMERATION_BUDGET:
            raise ValueError(f"{math.prod(sizes)} selections exceed the budget of {ENUMERATION_BUDGET}")
        stacked = [g.points for g in source.groups]
        # accumulate sums color by color over the full product grid
        sums = stacked[0]
        for P in stacked[1:]:
            sums = (sums[:, None, :] + P[None, :, :]).reshape(-1, P.shape[1])
        vals = _pnorm_rows(sums / source.k, p)
        best = int(np.argmin(vals))
        idx = [int(i) for i in np.unravel_index(best, sizes)]
        avg = _colorful_average(source, idx)
        return MaureyResult(idx, avg, float(_pnorm_rows(avg, p)), math.prod(sizes), None)

    if k is None or k < 1:
        raise ValueError("k must be a positive integer for a point cloud")
    P = source.points
    m = len(source)
    if m ** k > ENUMERATION_BUDGET:
        raise ValueError(f"m^k = {m ** k} exceeds the budget of {ENUMERATION_BUDGET}")
    combos = np.array(list(itertools.combinations_with_replacement(range(m), k)), dtype=int)
    vals = _pnorm_rows(P[combos].sum(axis=1) / k, p)
    order = np.argsort(vals, kind="stable")
    # recompute the leaders canonically so the reported norm matches _average
    best_idx, best_avg, best_val = None, None, np.inf
    for r in order[: min(len(order), 8)]:
        avg, nrm = _average(P, combos[r], p)
        if nrm < best_val:
            best_idx, best_avg, best_val = combos[r], avg, nrm
    return MaureyResult([int(i) for i in best_idx], best_avg, best_val, len(combos), None)
