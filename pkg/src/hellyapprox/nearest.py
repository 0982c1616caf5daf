"""Nearest point to the origin in a translated Minkowski sum of convex hulls.

Everything that needs a "closest convex combination" goes through
:func:`nearest_combination`, which minimizes

    || offset + sum_b  A_b^T w_b ||_p      over  w_b in the simplex,

where ``A_b`` is an ``(m_b, n)`` array of points (one block per hull).
With a single block and ``offset = x``, ``A = -V`` this is the distance from
``x`` to ``conv(V)``.

Solvers:

* ``p`` in ``{1, inf}``: one linear program (exact up to LP tolerance).
* ``p = 2``, single block: Wolfe's minimum-norm-point algorithm (finite).
* other ``p``, single block: the same corral method with a Newton inner
  solve on sum |y|^p.
* otherwise, or when the corral stalls: warm start (corral or the l_inf LP),
  then block-wise pairwise Frank-Wolfe with exact line search.

Each result carries a dual functional ``phi`` with ``||phi||_* <= 1`` and the
lower bound ``<phi, offset> + sum_b min_j <phi, a_bj>`` that it certifies.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .lp import solve_lp
from .normed_space import INF, _pnorm_rows

DEFAULT_MAX_ITER = 100_000


class NotConvergedError(RuntimeError):
    """Iteration budget exhausted; ``result`` holds the best point found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class NearestPoint:
    weights: List[np.ndarray]
    point: np.ndarray
    value: float
    dual: Optional[np.ndarray]
    lower: float
    iterations: int
    method: str
    converged: bool = True

    @property
    def gap(self):
        return max(self.value - self.lower, 0.0)


def _norming(y, p):
    a = np.abs(y)
    top = a.max()
    if top == 0:
        return None
    if p == 2:
        return y / np.sqrt(y @ y)
    p = float(p)
    a = a / top
    g = np.sign(y) * a ** (p - 1.0)
    return g / float(_pnorm_rows(a, p)) ** (p - 1.0)


def _lower_bound(phi, offset, blocks):
    if phi is None:
        return 0.0
    return float(phi @ offset + sum((A @ phi).min() for A in blocks))


def _finish(blocks, offset, p, weights, method, iterations, phi=None, converged=True):
    y = offset + sum(A.T @ w for A, w in zip(blocks, weights))
    value = float(_pnorm_rows(y, p))
    if phi is None and value > 0:
        phi = _norming(y, p)
    lower = max(_lower_bound(phi, offset, blocks), 0.0)
    return NearestPoint(list(weights), y, value, phi, lower, iterations, method, converged)


# ---------------------------------------------------------------------------
# polyhedral norms


def _solve_polyhedral(blocks, offset, p):
    n = offset.size
    sizes = [A.shape[0] for A in blocks]
    M = sum(sizes)
    At = np.vstack(blocks).T  # n x M
    extra = 1 if p == INF else n
    aux = -np.ones((n, 1)) if p == INF else -np.eye(n)
    A_ub = np.block([[At, aux], [-At, aux]])
    b_ub = np.concatenate([-offset, offset])
    A_eq = np.zeros((len(blocks), M + extra))
    start = 0
    for b, m in enumerate(sizes):
        A_eq[b, start:start + m] = 1.0
        start += m
    c = np.concatenate([np.zeros(M), np.ones(extra)])
    res = solve_lp(c, A_ub, b_ub, A_eq, np.ones(len(blocks)))
    if not res.success:
        raise NotConvergedError(f"LP solve failed: {res.status}")
    w_all = np.clip(res.x[:M], 0.0, None)
    weights, start = [], 0
    for m in sizes:
        w = w_all[start:start + m]
        s = w.sum()
        weights.append(w / s if s > 0 else np.full(m, 1.0 / m))
        start += m
    y1, y2 = res.ineq_marginals[:n], res.ineq_marginals[n:]
    phi = y2 - y1
    # guard the dual against roundoff so it stays in the dual unit ball
    dn = np.abs(phi).sum() if p == INF else np.abs(phi).max()
    if dn > 1.0:
        phi = phi / dn
    return _finish(blocks, offset, p, weights, "lp", res.iterations, phi=phi)


# ---------------------------------------------------------------------------
# Wolfe's minimum norm point (Euclidean, single hull)


def _affine_min(Q):
    if Q.shape[0] == 1:
        return np.ones(1)
    D = (Q[1:] - Q[0]).T
    beta = np.linalg.lstsq(D, -Q[0], rcond=None)[0]
    return np.concatenate([[1.0 - beta.sum()], beta])


def wolfe_min_norm(P, tol=1e-12, max_iter=DEFAULT_MAX_ITER, init=None):
    """Weights of the minimum-Euclidean-norm point of ``conv(P)``.

    Returns ``(weights, iterations, converged)``.
    """
    m = P.shape[0]
    sq = np.einsum("ij,ij->i", P, P)
    scale = max(float(sq.max()), 1e-300)
    if init is not None and np.count_nonzero(init) > 0:
        S = list(np.flatnonzero(init > 0))
        lam = init[S] / init[S].sum()
    else:
        S = [int(np.argmin(sq))]
        lam = np.ones(1)
    x = lam @ P[S]
    it, converged = 0, False
    while it < max_iter:
        it += 1
        dots = P @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol * scale or j in S:
            converged = x @ x - dots[j] <= 1e3 * tol * scale
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_min(P[S])
            if np.all(alpha > 1e-14):
                lam = alpha
                break
            neg = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg & (lam - alpha > 0), lam / (lam - alpha), np.inf)
            hit = int(np.argmin(ratios))
            theta = min(1.0, float(ratios[hit]))
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > 1e-14
            if np.isfinite(ratios[hit]):
                keep[hit] = False
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]
    w = np.zeros(m)
    w[S] = lam
    return w, it, converged


def _affine_min_pnorm(Q, lam, p, max_newton=60):
    """Minimize sum |y|^p over the affine hull of the rows of Q, from ``lam``."""
    if Q.shape[0] == 1:
        return np.ones(1)
    s = max(float(np.abs(Q).max()), 1e-300)
    Q = Q / s
    # if the affine hull passes through 0, the Euclidean solution is exact
    alpha = _affine_min(Q)
    if np.abs(alpha @ Q).max() <= 1e-14:
        return alpha
    D = (Q[1:] - Q[0]).T
    beta = lam[1:].astype(float).copy()

    def f(b):
        return float((np.abs(Q[0] + D @ b) ** p).sum())

    fb = f(beta)
    for _ in range(max_newton):
        y = Q[0] + D @ beta
        a = np.maximum(np.abs(y), 1e-12 * max(np.abs(y).max(), 1e-300))
        g = D.T @ (p * np.sign(y) * a ** (p - 1.0))
        H = D.T @ ((p * (p - 1.0) * a ** (p - 2.0))[:, None] * D)
        H[np.diag_indices_from(H)] += 1e-14 * max(np.trace(H), 1e-300)
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        dec = -float(g @ step)
        if dec <= 1e-26 * max(fb, 1e-300):
            break
        # exact line search: plain Newton steps oscillate when the
        # minimizer sits near a zero coordinate (|y|^p has unbounded curvature)
        t = _line_search(y, D @ step, 2.0, p)
        cand = beta + t * step
        fc = f(cand)
        if not fc < fb:
            break
        beta, fb = cand, fc
        if dec <= 1e-22 * max(fb, 1e-300):
            break
    return np.concatenate([[1.0 - beta.sum()], beta])


def smooth_wolfe(P, p, tol, max_iter=DEFAULT_MAX_ITER, zero_tol=0.0):
    """Corral method for the minimum l_p-norm point of ``conv(P)``, 1 < p < inf.

    Same major/minor cycle structure as Wolfe's algorithm; the affine
    minimization in the minor cycle is done by damped Newton on sum |y|^p.
    Returns ``(weights, iterations, converged)``.
    """
    m, n = P.shape
    nrm = _pnorm_rows(P, p)
    S = [int(np.argmin(nrm))]
    lam = np.ones(1)
    x = P[S[0]].copy()
    it, converged = 0, False
    # the corral rarely needs more than a few passes over n + 1 points;
    # past that the caller's Frank-Wolfe fallback is cheaper
    max_iter = min(max_iter, 10 * (n + 1))
    while it < max_iter:
        it += 1
        value = float(_pnorm_rows(x, p))
        if value <= max(zero_tol, 1e-300):
            converged = True
            break
        phi = _norming(x, p)
        dots = P @ phi
        j = int(np.argmin(dots))
        if value - dots[j] <= tol:
            converged = True
            break
        if j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_min_pnorm(P[S], lam, p)
            if np.all(alpha > 1e-14):
                lam = alpha
                break
            neg = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg & (lam - alpha > 0), lam / (lam - alpha), np.inf)
            hit = int(np.argmin(ratios))
            theta = min(1.0, float(ratios[hit]))
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > 1e-14
            if np.isfinite(ratios[hit]):
                keep[hit] = False
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            S = [s_ for s_, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]
    w = np.zeros(m)
    w[S] = lam
    return w, it, converged


# ---------------------------------------------------------------------------
# pairwise Frank-Wolfe


def _line_search(y, d, gmax, p):
    """argmin over [0, gmax] of ||y + g d||_p (convex in g)."""
    if p == 2:
        dd = d @ d
        if dd == 0:
            return 0.0
        return float(np.clip(-(y @ d) / dd, 0.0, gmax))
    p = float(p)
    s = max(np.abs(y).max(), np.abs(d).max() * gmax, 1e-300)
    ys, ds = y / s, d / s

    def slope(g):
        r = ys + g * ds
        return float((np.sign(r) * np.abs(r) ** (p - 1.0)) @ ds)

    if slope(gmax) <= 0:
        return gmax
    if slope(0.0) >= 0:
        return 0.0
    lo, hi = 0.0, gmax
    dd = ds @ ds
    g = float(np.clip(-(ys @ ds) / dd, 0.0, gmax)) if dd > 0 else 0.5 * gmax
    for _ in range(80):
        r = ys + g * ds
        a = np.abs(r)
        h = float((np.sign(r) * a ** (p - 1.0)) @ ds)
        if h > 0:
            hi = g
        else:
            lo = g
        if hi - lo <= 1e-15 * (1.0 + gmax) or h == 0:
            break
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            hp = (p - 1.0) * float((a ** (p - 2.0)) @ (ds * ds))
        g_new = g - h / hp if np.isfinite(hp) and hp > 0 else -1.0
        if not (lo < g_new < hi):
            g_new = 0.5 * (lo + hi)
        g = g_new
    return g


def _pairwise_fw(blocks, offset, p, weights, tol, max_iter, zero_tol):
    weights = [w.copy() for w in weights]
    y = offset + sum(A.T @ w for A, w in zip(blocks, weights))
    best_lower, best_phi = 0.0, None
    it = 0
    converged = False
    while it < max_iter:
        value = float(_pnorm_rows(y, p))
        if value <= zero_tol:
            converged = True
            break
        phi = _norming(y, p)
        best_gap, choice, lower = -1.0, None, float(phi @ offset)
        for b, A in enumerate(blocks):
            s = A @ phi
            j_fw = int(np.argmin(s))
            lower += float(s[j_fw])
            active = np.flatnonzero(weights[b] > 0)
            j_aw = int(active[np.argmax(s[active])])
            g = float(s[j_aw] - s[j_fw])
            if g > best_gap:
                best_gap, choice = g, (b, j_fw, j_aw)
        if lower > best_lower:
            best_lower, best_phi = lower, phi
        if value - best_lower <= tol:
            converged = True
            break
        b, j_fw, j_aw = choice
        if j_fw == j_aw:
            # no pairwise progress possible within tolerance
            converged = value - best_lower <= 10 * tol
            break
        A = blocks[b]
        d = A[j_fw] - A[j_aw]
        gamma = _line_search(y, d, float(weights[b][j_aw]), p)
        if gamma <= 0:
            break
        weights[b][j_fw] += gamma
        weights[b][j_aw] -= gamma
        if weights[b][j_aw] <= 1e-15:
            weights[b][j_fw] += weights[b][j_aw]
            weights[b][j_aw] = 0.0
        y = y + gamma * d
        it += 1
        if it % 200 == 0:
            # refresh accumulated roundoff in the running point
            y = offset + sum(A_.T @ w for A_, w in zip(blocks, weights))
    res = _finish(blocks, offset, p, weights, "frank-wolfe", it, converged=converged)
    if best_lower > res.lower and best_phi is not None:
        res.lower, res.dual = best_lower, best_phi
    return res


# ---------------------------------------------------------------------------


def nearest_combination(blocks, p, offset=None, tol=1e-10, max_iter=DEFAULT_MAX_ITER,
                        zero_tol=None, warm_start=None):
    """Minimize ``||offset + sum_b A_b^T w_b||_p`` over products of simplices.

    Parameters
    ----------
    blocks : list of (m_b, n) arrays
    p : exponent of the norm being minimized (``math.inf`` allowed)
    offset : (n,) array, default zero
    tol : target gap between the value and the certified lower bound
    zero_tol : values at or below this are treated as reaching zero
    warm_start : optional list of starting weights (one per block)

    Returns
    -------
    NearestPoint
    """
    blocks = [np.atleast_2d(np.asarray(A, dtype=float)) for A in blocks]
    if not blocks or any(A.shape[0] == 0 for A in blocks):
        raise ValueError("every block needs at least one point")
    n = blocks[0].shape[1]
    if any(A.shape[1] != n for A in blocks):
        raise ValueError("blocks have different dimensions")
    offset = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
    if offset.shape != (n,):
        raise ValueError(f"offset must have shape ({n},)")
    if zero_tol is None:
        zero_tol = tol

    if p == 1 or p == INF:
        return _solve_polyhedral(blocks, offset, p)
    # exact exponents (e.g. Fraction(3, 2)) would turn arrays into objects
    p = float(p)

    if len(blocks) == 1 and warm_start is None:
        P = offset[None, :] + blocks[0]
        if p == 2:
            w, it, _ = wolfe_min_norm(P, tol=1e-14, max_iter=max_iter)
        else:
            w, it, _ = smooth_wolfe(P, p, tol=tol, max_iter=max_iter, zero_tol=zero_tol)
        start = [w]
        res = _finish(blocks, offset, p, start, "wolfe", it)
        if res.value <= zero_tol or res.gap <= tol:
            return res
    elif warm_start is not None:
        start = [np.asarray(w, dtype=float) / np.sum(w) for w in warm_start]
    else:
        start = _solve_polyhedral(blocks, offset, INF).weights
        res = _finish(blocks, offset, p, start, "lp", 0)
        if res.value <= zero_tol:
            return res
    return _pairwise_fw(blocks, offset, p, start, tol, max_iter, zero_tol)
