"""V-polytopes and l_p distances to them, with dual (subgradient) certificates."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .nearest import DEFAULT_MAX_ITER, NotConvergedError, nearest_combination
from .normed_space import as_vector, dual_norm

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VPolytope:
    """``conv(vertices)``; ``vertices`` is an ``(m, n)`` array, ``m >= 1``."""

    vertices: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float, ndmin=2)
        if V.ndim != 2 or V.shape[0] == 0 or V.shape[1] == 0:
            raise ValueError(f"need a nonempty (m, n) vertex array, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertices have non-finite coordinates")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def __len__(self):
        return self.vertices.shape[0]

    def __eq__(self, other):
        return isinstance(other, VPolytope) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def translate(self, v):
        return VPolytope(self.vertices + np.asarray(v, dtype=float))

    def scale(self, s):
        return VPolytope(self.vertices * float(s))

    def to_json(self):
        return {"vertices": self.vertices.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["vertices"])


@dataclass
class DistanceResult:
    value: float
    weights: np.ndarray
    nearest: np.ndarray
    subgradient: Optional[np.ndarray]
    # value minus the lower bound certified by the dual functional
    gap: float


def _check_dims(x, K, space):
    if K.dim != space.dim:
        raise ValueError(f"polytope has dimension {K.dim}, space {space} has dimension {space.dim}")
    return as_vector(x, space)


def distance(x, K, space, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Distance from ``x`` to ``K`` in ``space``.

    For ``p`` in ``{1, inf}`` this is an exact LP; otherwise an active-set
    (Wolfe-type) method with a Frank-Wolfe fallback, stopped when the duality
    gap is at most ``tol``.  When the value exceeds ``tol`` the result carries
    a subgradient ``psi`` of the distance function at ``x``:
    ``||psi||_* <= 1`` and ``<psi, z - x> <= -(value - gap)`` for all z in K.

    Raises :class:`NotConvergedError` (with the partial result) when the
    iteration budget runs out first.
    """
    x = _check_dims(x, K, space)
    if tol <= 0:
        raise ValueError("tol must be positive")
    res = nearest_combination([-K.vertices], space.p, offset=x, tol=tol, max_iter=max_iter)
    w = res.weights[0]
    nearest = w @ K.vertices
    psi = res.dual if res.value > tol else None
    out = DistanceResult(res.value, w, nearest, psi, res.gap)
    if res.value > tol and res.gap > tol:
        raise NotConvergedError(
            f"distance not converged after {res.iterations} iterations (gap {res.gap:.3g})", out)
    return out


def distance_subgradient(x, K, space, tol=DEFAULT_TOL):
    """Subgradient of ``dist(., K)`` at ``x``; refuses points of ``K``."""
    res = distance(x, K, space, tol=tol)
    if res.subgradient is None:
        raise ValueError("x lies in K (distance within tol); the subgradient is not unique there")
    return res.subgradient


def support_value(K, psi):
    """``max_{z in K} <psi, z>``, attained at a vertex."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (K.dim,):
        raise ValueError(f"functional has shape {psi.shape}, polytope dimension is {K.dim}")
    return float((K.vertices @ psi).max())


def contains(x, K, space, tol=DEFAULT_TOL):
    return distance(x, K, space, tol=tol).value <= tol


def check_subgradient(psi, x, K, space, value, tol):
    """True if ``psi`` certifies ``dist(x, K) >= value - tol``."""
    x = np.asarray(x, dtype=float)
    return (dual_norm(psi, space) <= 1 + tol
            and support_value(K, psi) - psi @ x <= -(value - tol))
