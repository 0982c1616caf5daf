"""The l_inf^{2k} family with k-wise intersections but Helly radius k/(2k-1).

Coordinates ``t = 0..2k-1``.  For a k-subset ``J`` the sign vector ``x_J``
is -1 on ``J`` and +1 off it; ``K_i`` is the hull of the ``x_J`` with
``i in J``.  The functionals ``u_i = a_k (e_i - (1/2k) sum_j e_j)`` with
``a_k = k/(2k-1)`` have l_1 norm 1, sum to zero, and satisfy
``<u_i, z> = -a_k`` on every vertex of ``K_i``, so every point is at
distance at least ``a_k`` from some ``K_i``, while every k sets share the
point ``x_J``.

:func:`transfer_counterexample` moves the construction into another space
through a linear map ``T`` from l_1^{2k} into the target's dual.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict

import numpy as np

from .helly import Family, LowerCertificate
from .lp import solve_lp
from .nearest import nearest_combination
from .normed_space import INF, NormSpec, _pnorm_rows, norming_functional, norms
from .polytope import VPolytope

MAX_K = 10
EXACT_MAX_K = 6


def a_k(k):
    return k / (2 * k - 1)


def colex_subsets(n, k):
    """k-subsets of ``range(n)`` in colexicographic order."""
    return sorted(itertools.combinations(range(n), k), key=lambda J: J[::-1])


def sign_vector(J, n):
    x = np.ones(n)
    x[list(J)] = -1.0
    return x


@dataclass
class CounterexampleInstance:
    k: int
    family: Family
    functionals: np.ndarray
    a_k: float
    witnesses: Dict[tuple, np.ndarray]

    def certificate(self):
        """The construction's own lower certificate ``(u_i, a_k)``."""
        return LowerCertificate(self.functionals.copy(), self.a_k)


def _check_k(k, cap=MAX_K):
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= cap:
        raise ValueError(f"k must be an integer in [1, {cap}], got {k!r}")
    return int(k)


def build_linf_counterexample(k):
    """Build the family, functionals and witnesses for ``1 <= k <= 10``."""
    k = _check_k(k)
    n = 2 * k
    ak = a_k(k)
    U = ak * (np.eye(n) - 1.0 / n)
    subsets = colex_subsets(n, k)
    witnesses = {J: sign_vector(J, n) for J in subsets}
    sets = []
    for i in range(n):
        sets.append(VPolytope(np.array([witnesses[J] for J in subsets if i in J])))
    return CounterexampleInstance(k, Family(sets, NormSpec(n, INF)), U, ak, witnesses)


def exact_check(k):
    """Re-derive every invariant of the construction in rational arithmetic.

    Returns a dict of named boolean checks; all are True for a correct
    construction.  Limited to ``k <= 6``.
    """
    k = _check_k(k, EXACT_MAX_K)
    n = 2 * k
    ak = Fraction(k, 2 * k - 1)
    w = [[(1 if t == i else 0) - Fraction(1, n) for t in range(n)] for i in range(n)]
    u = [[ak * v for v in row] for row in w]
    subsets = colex_subsets(n, k)
    xs = {J: [-1 if t in J else 1 for t in range(n)] for J in subsets}
    w_norm = Fraction(2 * k - 1, k)
    checks = {
        "w_norm": all(sum(abs(v) for v in row) == w_norm for row in w),
        "u_norm_one": all(sum(abs(v) for v in row) == 1 for row in u),
        "u_sum_zero": all(sum(u[i][t] for i in range(n)) == 0 for t in range(n)),
        "x_sign_vectors": all(set(x) <= {-1, 1} and sum(x) == 0 for x in xs.values()),
        "vertex_values": all(sum(a * b for a, b in zip(u[i], xs[J])) == -ak
                             for J in subsets for i in J),
        "vertex_count": all(sum(1 for J in subsets if i in J) == math.comb(2 * k - 1, k - 1)
                            for i in range(n)),
    }
    return checks


def float_check(inst, tol=1e-12):
    """The same invariants in floating point, to ``tol``."""
    n, ak, U = 2 * inst.k, inst.a_k, inst.functionals
    out = {
        "u_norm_one": bool(np.all(np.abs(np.abs(U).sum(axis=1) - 1.0) <= tol)),
        "u_sum_zero": bool(np.abs(U.sum(axis=0)).max() <= tol),
        "x_sign_vectors": all(set(np.unique(x)) <= {-1.0, 1.0} and x.sum() == 0
                              for x in inst.witnesses.values()),
        "vertex_values": all(bool(np.all(np.abs(K.vertices @ U[i] + ak) <= tol))
                             for i, K in enumerate(inst.family.sets)),
        "vertex_count": all(len(K) == math.comb(n - 1, inst.k - 1) for K in inst.family.sets),
    }
    return out


# ---------------------------------------------------------------------------
# transfer


@dataclass(frozen=True, eq=False)
class Embedding:
    """Linear map ``T`` from l_1^{2k} into the dual of ``space``.

    ``matrix`` has one column per basis vector ``e_i`` (shape ``(dim, 2k)``);
    ``eta`` is the user's claim ``||T^{-1}|| <= 1 + eta`` on the image.
    """

    matrix: np.ndarray
    eta: float
    space: NormSpec

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float, ndmin=2)
        if M.ndim != 2 or M.shape[0] != self.space.dim:
            raise ValueError(f"matrix must have {self.space.dim} rows, got shape {M.shape}")
        if M.shape[1] % 2:
            raise ValueError("the source l_1^{2k} needs an even number of columns")
        if not np.all(np.isfinite(M)):
            raise ValueError("matrix has non-finite entries")
        if not self.eta >= 0:
            raise ValueError("eta must be nonnegative")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def k(self):
        return self.matrix.shape[1] // 2

    def operator_norm(self):
        """Norm from l_1: the largest dual norm of a column."""
        return float(norms(self.matrix.T, self.space.dual()).max())

    def validate(self, tol=1e-9):
        nrm = self.operator_norm()
        if nrm > 1 + tol:
            raise ValueError(f"||T|| = {nrm:.6g} exceeds 1")
        rank = np.linalg.matrix_rank(self.matrix)
        if rank < self.matrix.shape[1]:
            raise ValueError(f"T has rank {rank} < {self.matrix.shape[1]}; not injective")

    @classmethod
    def identity(cls, k):
        return cls(np.eye(2 * k), 0.0, NormSpec(2 * k, INF))

    def to_json(self):
        return {"space": self.space.to_json(), "matrix": self.matrix.tolist(), "eta": self.eta}

    @classmethod
    def from_json(cls, obj):
        return cls(np.array(obj["matrix"], dtype=float), float(obj.get("eta", 0.0)),
                   NormSpec.from_json(obj["space"]))


class RealizationError(ValueError):
    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


@dataclass
class TransferResult:
    family: Family
    certificate: LowerCertificate
    witnesses: Dict[tuple, np.ndarray]
    # per subset: max_{i in J} <psi_i, x_J> + bound (<= 0 when realized)
    slack: Dict[tuple, float]


def _realize_polyhedral(Psi, space):
    """min over ||x|| <= 1 of max_i <psi_i, x>, as an LP."""
    n = space.dim
    m = Psi.shape[0]
    if space.p == INF:
        # x = z - 1 with 0 <= z <= 2
        c = np.zeros(n + 1)
        c[-1] = 1.0
        A = np.vstack([np.hstack([Psi, -np.ones((m, 1))]),
                       np.hstack([np.eye(n), np.zeros((n, 1))])])
        b = np.concatenate([Psi.sum(axis=1), 2.0 * np.ones(n)])
        res = solve_lp(c, A, b, free=[n])
        x = res.x[:n] - 1.0
    else:
        # x = x+ - x-, sum(x+ + x-) <= 1
        c = np.zeros(2 * n + 1)
        c[-1] = 1.0
        A = np.vstack([np.hstack([Psi, -Psi, -np.ones((m, 1))]),
                       np.concatenate([np.ones(2 * n), [0.0]])[None, :]])
        b = np.concatenate([np.zeros(m), [1.0]])
        res = solve_lp(c, A, b, free=[2 * n])
        x = res.x[:n] - res.x[n:2 * n]
    if not res.success:
        raise RealizationError(f"realization LP failed: {res.status}", math.inf)
    # keep the point in the closed unit ball despite roundoff
    nx = float(_pnorm_rows(x, space.p))
    return x / nx if nx > 1 else x


def _realize_smooth(Psi, space):
    """Via duality: x = -(norming point of the least-norm combination of the psi_i)."""
    res = nearest_combination([Psi], space.q, tol=1e-12)
    if res.value <= 1e-15:
        return np.zeros(space.dim)
    return -norming_functional(res.point, space.dual())


def transfer_counterexample(k, emb, delta):
    """Family in ``emb.space`` with lower certificate ``a_k/(1+eta) - delta``.

    For each k-subset ``J`` the realization problem
    ``min_{||x|| <= 1} max_{i in J} <psi_i, x>`` is solved exactly (LP for
    p in {1, inf}, least-norm duality otherwise); its value is at most
    ``-a_k/(1+eta)`` when the embedding honors ``eta``.  Raises
    :class:`RealizationError` with the best gap when some subset misses the
    target ``-bound`` by more than ``delta``.
    """
    k = _check_k(k)
    if emb.k != k:
        raise ValueError(f"embedding has {2 * emb.k} columns, need {2 * k}")
    if not delta > 0:
        raise ValueError("delta must be positive")
    emb.validate()
    space = emb.space
    ak = a_k(k)
    U = ak * (np.eye(2 * k) - 1.0 / (2 * k))
    Psi = U @ emb.matrix.T  # row i = T u_i
    bound = ak / (1.0 + emb.eta) - delta
    realize = _realize_polyhedral if space.is_polyhedral else _realize_smooth
    subsets = colex_subsets(2 * k, k)
    witnesses, slack = {}, {}
    worst = -math.inf
    for J in subsets:
        x = realize(Psi[list(J)], space)
        s = float((Psi[list(J)] @ x).max()) + bound
        witnesses[J] = x
        slack[J] = s
        worst = max(worst, s)
    if worst > 0:
        raise RealizationError(
            f"realization misses the bound by {worst:.3g}; eta understates ||T^-1||", worst)
    sets = [VPolytope(np.array([witnesses[J] for J in subsets if i in J])) for i in range(2 * k)]
    cert = LowerCertificate(Psi, bound)
    return TransferResult(Family(sets, space), cert, witnesses, slack)
