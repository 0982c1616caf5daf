"""Approximate Helly centers: minimizing the (colorful) max-distance function.

For colors ``F_1..F_k`` of polytopes the objective is

    F(x) = (1/k) sum_i f_i(x),     f_i(x) = max_{K in F_i} dist(x, K),

and a plain family is the one-color case.  Besides the center, every solve
returns an optimality certificate built from distance subgradients at the
center: per color, a convex combination of the subgradients of the active
sets, chosen so that their average is as close to zero as possible.  A zero
average proves (by weak duality) that no point does better.
"""

import itertools
import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import rng
from .lp import solve_lp
from .nearest import NotConvergedError, nearest_combination
from .normed_space import INF, NormSpec, TypeEstimate, _check_type_exponent, _pnorm_rows, norms
from .polytope import VPolytope, distance, support_value

DEFAULT_TOL = 1e-6
KWISE_BUDGET = 200_000
# warning filters are process-global; sweeps call the conic solver from threads
_CVXPY_LOCK = threading.Lock()


@dataclass(frozen=True, eq=False)
class Family:
    sets: tuple
    space: NormSpec

    def __post_init__(self):
        sets = tuple(K if isinstance(K, VPolytope) else VPolytope(K) for K in self.sets)
        if not sets:
            raise ValueError("a family needs at least one set")
        for i, K in enumerate(sets):
            if K.dim != self.space.dim:
                raise ValueError(f"set {i} has dimension {K.dim}, space {self.space} has {self.space.dim}")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def translate(self, v):
        return Family([K.translate(v) for K in self.sets], self.space)

    def scale(self, s):
        return Family([K.scale(s) for K in self.sets], self.space)


@dataclass(frozen=True, eq=False)
class ColorfulFamily:
    colors: tuple

    def __post_init__(self):
        colors = tuple(self.colors)
        if not colors:
            raise ValueError("need at least one color")
        spaces = {(c.space.dim, c.space.p) for c in colors}
        if len(spaces) != 1:
            raise ValueError("colors live in different spaces")
        object.__setattr__(self, "colors", colors)

    @property
    def space(self):
        return self.colors[0].space

    @property
    def k(self):
        return len(self.colors)

    def translate(self, v):
        return ColorfulFamily([c.translate(v) for c in self.colors])

    def scale(self, s):
        return ColorfulFamily([c.scale(s) for c in self.colors])

    def flat_sets(self):
        """``(color, index, set)`` for every set, color by color."""
        return [(c, j, K) for c, fam in enumerate(self.colors) for j, K in enumerate(fam.sets)]


def as_colorful(family):
    if isinstance(family, ColorfulFamily):
        return family
    if isinstance(family, Family):
        return ColorfulFamily([family])
    raise TypeError(f"expected Family or ColorfulFamily, got {type(family).__name__}")


@dataclass
class OptimalityCertificate:
    """Subgradient certificate at a center.

    ``functionals[i]`` and ``weights[i]`` list, for color ``i``, the
    subgradients of its active sets and their convex weights.  A color of
    radius zero contributes the zero functional (``active[i]`` empty) unless
    the relaxed search needed normal-cone elements for it.
    ``residual`` is the dual norm of the weighted average over colors and
    ``lower`` the lower bound on ``min F`` that the certificate proves.
    """

    residual: float
    active: List[List[int]]
    functionals: List[np.ndarray]
    weights: List[np.ndarray]
    lower: float


@dataclass
class HellyOutcome:
    center: np.ndarray
    radii: List[float]
    objective: float
    active: List[List[int]]
    certificate_residual: float
    certified: bool
    lower: float
    method: str
    certificate: Optional[OptimalityCertificate] = field(default=None, repr=False)

    @property
    def mean_radius(self):
        return float(np.mean(self.radii))


@dataclass
class LowerCertificate:
    """Functionals ``psi_i`` (one per set, colors flattened) proving ``min F >= bound``.

    ``weights`` are per-color convex weights over that color's sets
    (flattened the same way); ``None`` means uniform weights, which for a
    plain family is the condition ``sum psi_i = 0``.
    """

    functionals: np.ndarray
    bound: float
    weights: Optional[np.ndarray] = None

    def to_json(self):
        out = {"functionals": np.asarray(self.functionals).tolist(), "bound": self.bound}
        if self.weights is not None:
            out["weights"] = np.asarray(self.weights).tolist()
        return out

    @classmethod
    def from_json(cls, obj):
        w = obj.get("weights")
        return cls(np.array(obj["functionals"], dtype=float), float(obj["bound"]),
                   None if w is None else np.array(w, dtype=float))


# ---------------------------------------------------------------------------
# evaluation


def radii_at(x, family, tol=1e-9):
    """Per-color radii and the full distance table at ``x``."""
    fam = as_colorful(family)
    dists = [[distance(x, K, fam.space, tol=tol) for K in color.sets] for color in fam.colors]
    radii = [max(d.value for d in row) for row in dists]
    return radii, dists


def objective(x, family, tol=1e-9):
    radii, _ = radii_at(x, family, tol)
    return float(np.mean(radii))


def _activity_slack(r, tol):
    return max(10.0 * tol, 0.01 * r)


def _max_vertex_norm(fam):
    return max(float(norms(K.vertices, fam.space).max()) for _, _, K in fam.flat_sets())


def _weak_duality(fam, active, functionals, weights, residual, F0):
    """Lower bound ``b0 - residual * (F0 + M)`` on ``min F`` from a certificate."""
    b0 = 0.0
    for c in range(fam.k):
        sets = fam.colors[c].sets
        b0 -= sum(w * support_value(sets[j], psi)
                  for j, psi, w in zip(active[c], functionals[c], weights[c]) if w > 0) / fam.k
    # the average functional s gives F(y) >= <s, y> + b0, and minimizers
    # lie within F0 + M of the origin
    return b0 - residual * (F0 + _max_vertex_norm(fam))


def _gradient_certificate(fam, dists, tol):
    """Smooth norms: the subgradient of each positive distance is unique."""
    space, k = fam.space, fam.k
    blocks, active = [], []
    for row in dists:
        r = max(d.value for d in row)
        if r <= tol:
            active.append([])
            blocks.append(np.zeros((0, space.dim)))
            continue
        cut = r - _activity_slack(r, tol)
        idx = [j for j, d in enumerate(row) if d.value >= cut]
        active.append(idx)
        blocks.append(np.array([row[j].subgradient for j in idx]))
    live = [B / k for B in blocks if len(B)]
    if not live:
        return 0.0, active, blocks, [np.zeros(0) for _ in blocks]
    res = nearest_combination(live, space.q, tol=0.1 * tol, zero_tol=0.1 * tol)
    it = iter(res.weights)
    weights = [next(it) if len(B) else np.zeros(0) for B in blocks]
    return res.value, active, blocks, weights


def _polyhedral_certificate(fam, x0, dists, tol, slack_rule):
    """p in {1, inf}: search the eps-subdifferentials of the active sets by LP.

    With ``phi_K = mu_K psi_K`` the conditions ``||psi_K||_* <= 1`` and
    ``<psi_K, x0> - h_K(psi_K) >= r_c - eps_c`` are linear in ``(phi, mu)``,
    so minimizing ``||(1/k) sum phi_K||_*`` over per-color simplices of
    ``mu`` is one LP.  Colors of radius zero take part through the normal
    cones of their sets.
    """
    space, k, n = fam.space, fam.k, fam.space.dim
    dual_l1 = space.p == INF
    entries, active = [], []
    for c, row in enumerate(dists):
        r = max(d.value for d in row)
        eps = slack_rule(r)
        idx = [j for j, d in enumerate(row) if d.value >= r - eps]
        active.append(idx)
        entries += [(c, j, max(r - eps, 0.0) if r > tol else 0.0) for j in idx]
    A = len(entries)
    per = n + 1 + (n if dual_l1 else 0)
    n_res = n if dual_l1 else 1
    ncol = A * per + n_res
    fixed, eq = [], np.zeros((k, ncol))
    for s, (c, j, level) in enumerate(entries):
        base = s * per
        for sign in (1.0, -1.0):
            R = np.zeros((n, ncol))
            R[:, base:base + n] = sign * np.eye(n)
            if dual_l1:
                R[:, base + n + 1:base + per] = -np.eye(n)
            else:
                R[:, base + n] = -1.0
            fixed.append(R)
        if dual_l1:
            R = np.zeros((1, ncol))
            R[0, base + n + 1:base + per] = 1.0
            R[0, base + n] = -1.0
            fixed.append(R)
        eq[c, base + n] = 1.0
    for sign in (1.0, -1.0):
        R = np.zeros((n, ncol))
        for s in range(A):
            R[:, s * per:s * per + n] = sign * np.eye(n) / k
        R[:, A * per:] = -np.eye(n) if dual_l1 else -1.0
        fixed.append(R)
    fixed = np.vstack(fixed)
    cost = np.zeros(ncol)
    cost[A * per:] = 1.0
    free = np.concatenate([np.arange(s * per, s * per + n) for s in range(A)])

    # vertex rows <phi_s, v - x0> + level_s mu_s <= 0 are added lazily:
    # start from the vertices nearest to x0 and add violated ones
    shifted = [fam.colors[c].sets[j].vertices - x0 for c, j, _ in entries]
    chosen = []
    for (c, j, _), D in zip(entries, shifted):
        d = dists[c][j]
        start = set(np.flatnonzero(d.weights > 0).tolist())
        start.update(np.argsort(norms(D, space), kind="stable")[:n + 1].tolist())
        chosen.append(sorted(start))
    for _ in range(200):
        rows = [fixed]
        for s, (D, idx) in enumerate(zip(shifted, chosen)):
            R = np.zeros((len(idx), ncol))
            R[:, s * per:s * per + n] = D[idx]
            R[:, s * per + n] = entries[s][2]
            rows.append(R)
        A_ub = np.vstack(rows)
        res = solve_lp(cost, A_ub, np.zeros(A_ub.shape[0]), eq, np.ones(k), free=free)
        if not res.success:
            raise NotConvergedError(f"certificate LP failed: {res.status}")
        added = False
        for s, D in enumerate(shifted):
            phi, mu = res.x[s * per:s * per + n], res.x[s * per + n]
            viol = D @ phi + entries[s][2] * mu
            scale = 1e-12 * max(1.0, float(np.abs(D).max()))
            bad = [int(i) for i in np.argsort(-viol, kind="stable")[:4 * n] if viol[i] > scale]
            bad = [i for i in bad if i not in chosen[s]]
            if bad:
                chosen[s] = sorted(chosen[s] + bad)
                added = True
        if not added:
            break
    functionals = [[] for _ in range(k)]
    weights = [[] for _ in range(k)]
    for s, (c, j, _) in enumerate(entries):
        mu = max(float(res.x[s * per + n]), 0.0)
        phi = res.x[s * per:s * per + n]
        psi = phi / mu if mu > 1e-14 else np.zeros(n)
        # LP roundoff can leave psi a hair outside the dual unit ball
        dn = float(_pnorm_rows(psi, space.q))
        if dn > 1.0:
            psi = psi / dn
        functionals[c].append(psi)
        weights[c].append(mu if mu > 1e-14 else 0.0)
    functionals = [np.array(f).reshape(-1, n) for f in functionals]
    weights = [np.array(w) / max(sum(w), 1e-300) for w in weights]
    avg = sum(w @ f for w, f in zip(weights, functionals)) / k
    return float(_pnorm_rows(avg, space.q)), active, functionals, weights


def _conic_certificate(fam, x0, dists, tol, slack_rule):
    """Smooth norms, general case: the same homogenized search as the LP
    version with the q-norm constraints kept as cones.

    Needed when a color of radius zero must contribute normal-cone elements
    (a center on the boundary of that color's intersection).  Only the
    functionals are taken from the conic solver; residual and bound are
    recomputed from them.
    """
    import cvxpy as cp

    space, k, n = fam.space, fam.k, fam.space.dim
    q = float(space.q)
    active, entries = [], []
    for c, row in enumerate(dists):
        r = max(d.value for d in row)
        eps = slack_rule(r)
        idx = [j for j, d in enumerate(row) if d.value >= r - eps]
        active.append(idx)
        entries += [(c, j, r - eps) for j in idx]
    phi = cp.Variable((len(entries), n))
    mu = cp.Variable(len(entries), nonneg=True)
    cons = []
    for c in range(k):
        cons.append(cp.sum(mu[[s for s, e in enumerate(entries) if e[0] == c]]) == 1)
    for s, (c, j, level) in enumerate(entries):
        D = fam.colors[c].sets[j].vertices - x0
        cons += [cp.pnorm(phi[s], q) <= mu[s], D @ phi[s] + level * mu[s] <= 0]
    prob = cp.Problem(cp.Minimize(cp.pnorm(cp.sum(phi, axis=0) / k, q)), cons)
    with _CVXPY_LOCK, warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prob.solve(solver="CLARABEL", tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12,
                   tol_ktratio=1e-10, max_iter=500)
    if phi.value is None:
        raise NotConvergedError(f"certificate cone program failed: {prob.status}")
    functionals = [[] for _ in range(k)]
    weights = [[] for _ in range(k)]
    for s, (c, j, _) in enumerate(entries):
        m = max(float(mu.value[s]), 0.0)
        psi = phi.value[s] / m if m > 1e-14 else np.zeros(n)
        dn = float(_pnorm_rows(psi, q))
        if dn > 1.0:
            psi = psi / dn
        functionals[c].append(psi)
        weights[c].append(m if m > 1e-14 else 0.0)
    functionals = [np.array(f).reshape(-1, n) for f in functionals]
    weights = [np.array(w) / max(sum(w), 1e-300) for w in weights]
    avg = sum(w @ f for w, f in zip(weights, functionals)) / k
    return float(_pnorm_rows(avg, q)), active, functionals, weights


def optimality_certificate(x0, family, tol=DEFAULT_TOL, dist_tol=None, _dists=None):
    """Residual of the subgradient certificate at ``x0`` plus its weights.

    Per color, the sets within the activity slack ``max(10 tol, 0.01 r_i)``
    of the color radius are active.  The residual is the least dual norm of
    ``(1/k) sum_i (convex combination of subgradients of color i's active
    sets)``.  For smooth norms the subgradient of each positive distance is
    unique and is tried first, with colors of radius zero contributing the
    zero functional; if that leaves a residual, whole eps-subdifferentials
    (normal cones for zero-radius colors) are searched as for p in {1, inf}
    (see :func:`_polyhedral_certificate` and :func:`_conic_certificate`).
    ``lower`` is the weak-duality bound the certificate proves on ``min F``.
    """
    fam = as_colorful(family)
    x0 = np.asarray(x0, dtype=float)
    if dist_tol is None:
        dist_tol = min(1e-9, 0.01 * tol)
    if _dists is None:
        _, _dists = radii_at(x0, fam, dist_tol)
    radii = [max(d.value for d in row) for row in _dists]
    F0 = float(np.mean(radii))
    rules = (lambda r: 1e-9 * max(1.0, r), lambda r: 10.0 * tol, lambda r: _activity_slack(r, tol))
    if fam.space.is_polyhedral:
        # near-exact activity first (LP centers are exact), wider slack on failure
        out = None
        for rule in rules:
            cand = _polyhedral_certificate(fam, x0, _dists, tol, rule)
            if out is None or cand[0] < out[0]:
                out = cand
            if out[0] <= 0.1 * tol:
                break
    else:
        out = _gradient_certificate(fam, _dists, tol)
        if out[0] > 0.1 * tol:
            # zero-radius colors may need normal-cone elements
            for rule in rules[1:]:
                try:
                    cand = _conic_certificate(fam, x0, _dists, tol, rule)
                except NotConvergedError:
                    continue
                if cand[0] < out[0]:
                    out = cand
                if out[0] <= 0.1 * tol:
                    break
    residual, active, functionals, weights = out
    lower = _weak_duality(fam, active, functionals, weights, residual, F0)
    return OptimalityCertificate(residual, active, functionals, weights, lower)


def certificate_to_lower(cert, family):
    """Turn an optimality certificate into a :class:`LowerCertificate` over all sets."""
    fam = as_colorful(family)
    flat = fam.flat_sets()
    pos = {(c, j): i for i, (c, j, _) in enumerate(flat)}
    psi = np.zeros((len(flat), fam.space.dim))
    w = np.zeros(len(flat))
    for c in range(fam.k):
        if not cert.active[c]:
            # zero functional carried by the first set of the color
            w[pos[(c, 0)]] = 1.0
            continue
        for j, f, wt in zip(cert.active[c], cert.functionals[c], cert.weights[c]):
            psi[pos[(c, j)]] = f
            w[pos[(c, j)]] = wt
    bound = 0.0
    for i, (c, j, K) in enumerate(flat):
        if w[i] > 0:
            bound -= w[i] * support_value(K, psi[i]) / fam.k
    return LowerCertificate(psi, bound, w)


# ---------------------------------------------------------------------------
# optimizers


def _solve_lp(fam, ball):
    """Exact minimax LP for p in {1, inf}."""
    space = fam.space
    n, k, p = space.dim, fam.k, space.p
    flat = fam.flat_sets()
    sizes = [len(K) for _, _, K in flat]
    n_lam = sum(sizes)
    n_aux = n * len(flat) if p == 1 else 0
    n_ball = (n if p == 1 else 0) if ball else 0
    # columns: x (free) | t (k) | lambda | per-set |residual| bounds (p=1) | |x| bounds (ball, p=1)
    ncol = n + k + n_lam + n_aux + n_ball
    rows, rhs = [], []
    eq_rows = []
    off_lam, off_aux = n + k, n + k + n_lam
    start = off_lam
    for s, (c, _, K) in enumerate(flat):
        m = len(K)
        for sign in (1.0, -1.0):
            R = np.zeros((n, ncol))
            R[:, :n] = sign * np.eye(n)
            R[:, start:start + m] = -sign * K.vertices.T
            if p == INF:
                R[:, n + c] = -1.0
            else:
                R[:, off_aux + s * n: off_aux + (s + 1) * n] = -np.eye(n)
            rows.append(R)
            rhs.append(np.zeros(n))
        if p == 1:
            R = np.zeros((1, ncol))
            R[0, off_aux + s * n: off_aux + (s + 1) * n] = 1.0
            R[0, n + c] = -1.0
            rows.append(R)
            rhs.append(np.zeros(1))
        E = np.zeros(ncol)
        E[start:start + m] = 1.0
        eq_rows.append(E)
        start += m
    if ball:
        # ||x|| - 1 <= t_0
        if p == INF:
            for sign in (1.0, -1.0):
                R = np.zeros((n, ncol))
                R[:, :n] = sign * np.eye(n)
                R[:, n] = -1.0
                rows.append(R)
                rhs.append(np.ones(n))
        else:
            ob = off_aux + n_aux
            for sign in (1.0, -1.0):
                R = np.zeros((n, ncol))
                R[:, :n] = sign * np.eye(n)
                R[:, ob:ob + n] = -np.eye(n)
                rows.append(R)
                rhs.append(np.zeros(n))
            R = np.zeros((1, ncol))
            R[0, ob:ob + n] = 1.0
            R[0, n] = -1.0
            rows.append(R)
            rhs.append(np.ones(1))
    c = np.zeros(ncol)
    c[n:n + k] = 1.0 / k
    res = solve_lp(c, np.vstack(rows), np.concatenate(rhs), np.array(eq_rows), np.ones(len(flat)),
                   free=np.arange(n))
    if not res.success:
        raise NotConvergedError(f"minimax LP failed: {res.status}")
    return res.x[:n], res.iterations


def _solve_conic(fam, ball, tol):
    import cvxpy as cp

    space = fam.space
    n, k, p = space.dim, fam.k, float(space.p)
    x = cp.Variable(n)
    t = cp.Variable(k)
    cons = []
    for c, _, K in fam.flat_sets():
        lam = cp.Variable(len(K), nonneg=True)
        cons += [cp.sum(lam) == 1, cp.pnorm(x - K.vertices.T @ lam, p) <= t[c]]
    if ball:
        cons.append(cp.pnorm(x, p) - 1 <= t[0])
    prob = cp.Problem(cp.Minimize(cp.sum(t) / k), cons)
    eps = 1e-12
    with _CVXPY_LOCK, warnings.catch_warnings():
        # "inaccurate" warnings are moot: radii and certificate are recomputed in-repo
        warnings.simplefilter("ignore")
        prob.solve(solver="CLARABEL", tol_gap_abs=eps, tol_gap_rel=eps, tol_feas=eps,
                   tol_ktratio=1e-10, max_iter=500)
    if x.value is None:
        raise NotConvergedError(f"conic solve failed: {prob.status}")
    return np.asarray(x.value, dtype=float), prob.solver_stats.num_iters or 0


def _ball_term(x, space):
    return max(float(_pnorm_rows(x, space.p)) - 1.0, 0.0)


def _eval(x, fam, ball, dist_tol):
    radii, dists = radii_at(x, fam, dist_tol)
    if ball:
        radii[0] = max(radii[0], _ball_term(x, fam.space))
    return radii, dists


def _subgradient_run(fam, x, max_iters, radius, euclid_radius, lower, dist_tol, ball):
    """Projected subgradient descent from ``x``; returns the best iterate."""
    space = fam.space
    k = fam.k
    best_x, best_F = x.copy(), math.inf
    for t in range(1, max_iters + 1):
        radii, dists = _eval(x, fam, ball, dist_tol)
        F = float(np.mean(radii))
        if F < best_F:
            best_x, best_F = x.copy(), F
        g = np.zeros(space.dim)
        for c, row in enumerate(dists):
            j = int(np.argmax([d.value for d in row]))
            if row[j].subgradient is not None and row[j].value >= radii[c] - 1e-15:
                g += row[j].subgradient / k
            elif ball and c == 0 and radii[0] > 0:
                g += _norming_primal_grad(x, space) / k
        gg = float(g @ g)
        if gg == 0.0:
            break
        if lower is not None:
            step = max(F - lower, 0.0) / gg
            if step == 0.0:
                break
        else:
            step = radius / (math.sqrt(t) * math.sqrt(gg))
        x = x - step * g
        nx = float(np.linalg.norm(x))
        if nx > euclid_radius:
            x *= euclid_radius / nx
    return best_x, best_F


def _norming_primal_grad(x, space):
    # gradient of ||x||_p lives in the dual; used only for the ball term
    from .normed_space import norming_functional
    return norming_functional(x, space)


def _solve_subgradient(fam, ball, max_iters, seed, starts, lower, dist_tol):
    space = fam.space
    n = space.dim
    zero = np.zeros(n)
    F0 = float(np.mean(_eval(zero, fam, ball, dist_tol)[0]))
    M = _max_vertex_norm(fam)
    radius = F0 + M
    # Euclidean ball containing the l_p ball of that radius
    euclid = radius * n ** max(0.0, 0.5 - (0.0 if space.p == INF else 1.0 / float(space.p)))
    best = None
    for s in range(starts):
        if s == 0:
            x = zero.copy()
        else:
            g = rng.stream(seed, rng.HELLY_START, s).standard_normal(n)
            x = g / np.linalg.norm(g) * euclid * 0.5
        bx, bF = _subgradient_run(fam, x, max_iters, radius, euclid, lower, dist_tol, ball)
        if best is None or bF < best[1]:
            best = (bx, bF)
    return best[0], max_iters * starts


def minimize_max_distance(family, tol=DEFAULT_TOL, max_iters=2000, seed=0, method="auto",
                          starts=8, lower=None, ball=False):
    """Center minimizing the average over colors of the max distance.

    Parameters
    ----------
    family : Family or ColorfulFamily
    tol : certification tolerance on the certificate residual
    method : ``"auto"`` (LP for p in {1, inf}, conic otherwise), ``"lp"``,
        ``"conic"`` or ``"subgradient"``
    max_iters, seed, starts : subgradient method budget, start seed, restarts
    lower : known lower bound on the optimum (enables Polyak steps)
    ball : add ``max(||x|| - 1, 0)`` to the single color's max (k-wise checks)

    Returns
    -------
    HellyOutcome
        Uncertified outcomes (residual above ``tol``) are returned with
        ``certified=False``, never raised.
    """
    fam = as_colorful(family)
    space = fam.space
    if ball and fam.k != 1:
        raise ValueError("the ball term is only defined for a single color")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dist_tol = min(1e-9, 0.01 * tol)
    if method == "auto":
        method = "lp" if space.is_polyhedral else "conic"
    if method == "lp":
        if not space.is_polyhedral:
            raise ValueError(f"the LP method needs p in {{1, inf}}, got {space}")
        x0, _ = _solve_lp(fam, ball)
    elif method == "conic":
        try:
            x0, _ = _solve_conic(fam, ball, tol)
        except Exception:
            # solver failure: fall back to the first-order method
            method = "subgradient"
            x0, _ = _solve_subgradient(fam, ball, max_iters, seed, starts, lower, dist_tol)
    elif method == "subgradient":
        x0, _ = _solve_subgradient(fam, ball, max_iters, seed, starts, lower, dist_tol)
    else:
        raise ValueError(f"unknown method {method!r}")

    radii, dists = _eval(x0, fam, ball, dist_tol)
    F0 = float(np.mean(radii))
    if all(r <= tol for r in radii):
        cert = OptimalityCertificate(0.0, [[] for _ in radii],
                                     [np.zeros((1, space.dim)) for _ in radii],
                                     [np.ones(1) for _ in radii], 0.0)
    elif ball:
        cert = None
    else:
        cert = optimality_certificate(x0, fam, tol, dist_tol, _dists=dists)
    if cert is None:
        residual, low, active = math.nan, 0.0, [[]]
    else:
        residual, low, active = cert.residual, max(cert.lower, 0.0), cert.active
    certified = bool(residual <= tol)
    return HellyOutcome(x0, radii, F0, active, residual, certified, low, method, cert)


# ---------------------------------------------------------------------------
# certificates and bounds


def verify_lower_bound(family, cert, tol=1e-9):
    """Check a :class:`LowerCertificate`.

    With per-color weights ``mu`` (uniform if absent) the checks are

    * ``||(1/k) sum mu_i psi_i||_* <= tol``,
    * ``||psi_i||_* <= 1 + tol`` for every set,
    * ``(1/k) sum mu_i h_i(psi_i) <= -bound + tol`` where ``h_i`` is the
      support function of set ``i``.

    When all hold, every point ``y`` has ``F(y) >= bound - c * tol`` with
    ``c = 2 + M + 2 * max(bound, 0)`` and ``M`` the largest vertex norm:
    points with ``||y|| > M + bound`` are farther than ``bound`` from every
    set, and for the rest the three checks chain through
    ``dist(y, K_i) >= (<psi_i, y> - h_i(psi_i)) / ||psi_i||_*``.
    """
    fam = as_colorful(family)
    flat = fam.flat_sets()
    psi = np.atleast_2d(np.asarray(cert.functionals, dtype=float))
    if psi.shape[0] != len(flat):
        raise ValueError(f"{psi.shape[0]} functionals for {len(flat)} sets")
    if psi.shape[1] != fam.space.dim:
        raise ValueError(f"functionals have dimension {psi.shape[1]}, space has {fam.space.dim}")
    colors = np.array([c for c, _, _ in flat])
    if cert.weights is None:
        w = np.array([1.0 / len(fam.colors[c]) for c in colors])
    else:
        w = np.asarray(cert.weights, dtype=float)
        if w.shape != (len(flat),) or np.any(w < 0):
            raise ValueError("weights must be one nonnegative number per set")
        for c in range(fam.k):
            if abs(w[colors == c].sum() - 1.0) > 1e-9:
                raise ValueError(f"weights of color {c} do not sum to 1")
    dual = fam.space.dual()
    avg = (w[:, None] * psi).sum(axis=0) / fam.k
    if float(_pnorm_rows(avg, dual.p)) > tol:
        return False
    if float(norms(psi, dual).max()) > 1 + tol:
        return False
    h = sum(wi * support_value(K, f) for wi, f, (_, _, K) in zip(w, psi, flat) if wi > 0) / fam.k
    return bool(h <= -cert.bound + tol)


def lower_bound_slack(family, bound):
    """The constant ``c`` in the ``bound - c * tol`` guarantee of :func:`verify_lower_bound`."""
    return 2.0 + _max_vertex_norm(as_colorful(family)) + 2.0 * max(bound, 0.0)


@dataclass
class KwiseReport:
    subsets: List[tuple]
    passed: List[bool]
    values: List[float]

    @property
    def all_passed(self):
        return all(self.passed)


def _witness_key(J):
    return tuple(sorted(int(j) for j in J))


def verify_kwise_intersection(family, k, tol=1e-9, witnesses=None, budget=KWISE_BUDGET):
    """Check that every ``k`` sets have a common point in the unit ball.

    With ``witnesses`` (a map from sorted index tuples to points) each
    subset's witness is checked directly; subsets without a witness, or all
    subsets when none are given, are decided by solving
    ``min_x max(max_{i in J} dist(x, K_i), ||x|| - 1)`` to tolerance.
    ``values`` holds the witness violation or the solved minimum.
    """
    if not isinstance(family, Family):
        raise TypeError("k-wise checks take a plain Family")
    N = len(family)
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, {N}]")
    count = math.comb(N, k)
    if count > budget and witnesses is None:
        raise ValueError(f"{count} subsets exceed the enumeration budget {budget} and no witnesses were given")
    space = family.space
    wit = {} if witnesses is None else {_witness_key(J): np.asarray(x, dtype=float)
                                        for J, x in witnesses.items()}
    subsets, passed, values = [], [], []
    for J in itertools.combinations(range(N), k):
        x = wit.get(J)
        if x is not None:
            v = max([_ball_term(x, space)]
                    + [distance(x, family.sets[i], space, tol=0.1 * tol).value for i in J])
        else:
            if count > budget:
                raise ValueError(f"subset {J} has no witness and the budget forbids solving")
            sub = Family([family.sets[i] for i in J], space)
            v = minimize_max_distance(sub, tol=tol, ball=True).objective
        subsets.append(J)
        values.append(float(v))
        passed.append(bool(v <= tol))
    return KwiseReport(subsets, passed, values)


def upper_bound(T, k):
    """Helly radius bound ``6 T k^(-1 + 1/p)`` for a dual type estimate ``T``."""
    if not isinstance(T, TypeEstimate):
        raise TypeError("expected a TypeEstimate")
    p = _check_type_exponent(T.p)
    if k < 1:
        raise ValueError("k must be positive")
    return 6.0 * T.constant * float(k) ** (-1.0 + 1.0 / float(p))


def euclidean_bound(k):
    """Sharper Euclidean bound ``k^(-1/2)`` on the mean colorful radius."""
    if k < 1:
        raise ValueError("k must be positive")
    return 1.0 / math.sqrt(k)
