"""Small dense two-phase simplex method.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0`` (or free, per ``free``).  The tableau keeps the columns of the
starting basis, so the lexicographic ratio test is always available; with it
the method cannot cycle and the final basis is a deterministic function of
the input.

Marginals follow the ``scipy.optimize.linprog`` convention: the derivative
of the optimal value with respect to each right-hand side entry.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: Optional[np.ndarray]
    fun: float
    status: str  # optimal | infeasible | unbounded | iteration_limit
    ineq_marginals: Optional[np.ndarray]
    eq_marginals: Optional[np.ndarray]
    iterations: int

    @property
    def success(self):
        return self.status == "optimal"


def _as2d(A, n):
    if A is None:
        return np.zeros((0, n))
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError(f"constraint matrix must have {n} columns, got shape {A.shape}")
    return A


class _Tableau:
    def __init__(self, A, b, basis, barred, tol):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.m, self.n = m, n
        self.basis = list(basis)
        self.init_cols = list(basis)
        self.barred = barred
        self.tol = tol
        self.iterations = 0

    def set_costs(self, c):
        T = self.T
        T[-1, :] = 0.0
        T[-1, : self.n] = c
        for r, j in enumerate(self.basis):
            if c[j] != 0.0:
                T[-1] -= c[j] * T[r]

    def _leaving_row(self, q):
        T, tol = self.T, self.tol
        col = T[: self.m, q]
        scale = max(1.0, float(np.abs(col).max()))
        rows = np.flatnonzero(col > tol * scale)
        if rows.size == 0:
            return None
        ratios = T[rows, -1] / col[rows]
        theta = ratios.min()
        ties = rows[ratios <= theta + 1e-12 * (1.0 + abs(theta))]
        if ties.size > 1:
            M = T[np.ix_(ties, self.init_cols)] / col[ties, None]
            # columns constant over the tied rows cannot break the tie
            live = np.flatnonzero(np.ptp(M, axis=0) > 1e-12)
            keep = np.arange(ties.size)
            for j in live:
                if keep.size == 1:
                    break
                vals = M[keep, j]
                keep = keep[vals <= vals.min() + 1e-12 * (1.0 + abs(vals.min()))]
            ties = ties[keep]
        if ties.size > 1:
            ties = ties[np.argsort([self.basis[r] for r in ties], kind="stable")]
        return int(ties[0])

    def pivot(self, r, q):
        T = self.T
        T[r] /= T[r, q]
        col = T[:, q].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        if rows.size * 4 < col.size:
            T[rows] -= col[rows, None] * T[r]
        else:
            T -= np.outer(col, T[r])
        self.basis[r] = q
        self.iterations += 1

    def run(self, max_iter):
        T, tol = self.T, self.tol
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            red = T[-1, : self.n].copy()
            red[self.barred] = 0.0
            q = int(np.argmin(red))
            cscale = max(1.0, float(np.abs(T[-1, : self.n]).max()))
            if red[q] >= -tol * cscale:
                return "optimal"
            r = self._leaving_row(q)
            if r is None:
                return "unbounded"
            self.pivot(r, q)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None, max_iter=None,
             tol=1e-10, perturb=True):
    """Minimize ``c.x``; see the module docstring for the problem form.

    ``free`` is a boolean mask (or index list) of variables without sign
    constraint.  Returns an :class:`LPResult`; infeasible and unbounded
    problems are reported through ``status`` rather than raised.

    With ``perturb`` the inequality right-hand sides are relaxed by tiny
    deterministic amounts while pivoting, which breaks the massive ties of
    degenerate problems (e.g. all-zero right-hand sides).  The final basis is
    re-solved with the true data; if it is not primal feasible there the
    problem is solved again unperturbed.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_ub, A_eq = _as2d(A_ub, n), _as2d(A_eq, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if b_ub.size != A_ub.shape[0] or b_eq.size != A_eq.shape[0]:
        raise ValueError("right-hand side sizes do not match the constraint matrices")
    free_mask = np.zeros(n, dtype=bool)
    if free is not None:
        free_mask[np.asarray(free)] = True
    free_idx = np.flatnonzero(free_mask)

    # structural columns: x (>=0 parts), then negative parts of free variables
    A = np.vstack([A_ub, A_eq])
    A = np.hstack([A, -A[:, free_idx]])
    cs = np.concatenate([c, -c[free_idx]])
    ns = cs.size
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    b = np.concatenate([b_ub, b_eq])

    sign = np.where(b < 0, -1.0, 1.0)
    slack = np.zeros((m, m_ub))
    slack[np.arange(m_ub), np.arange(m_ub)] = 1.0
    A = np.hstack([A, slack]) * sign[:, None]
    b = b * sign
    needs_art = np.flatnonzero((np.arange(m) >= m_ub) | (sign < 0))
    art = np.zeros((m, needs_art.size))
    art[needs_art, np.arange(needs_art.size)] = 1.0
    A = np.hstack([A, art])
    ntot = A.shape[1]
    art_cols = ns + m_ub + np.arange(needs_art.size)

    basis = np.empty(m, dtype=int)
    basis[:m_ub] = ns + np.arange(m_ub)
    basis[needs_art] = art_cols

    if max_iter is None:
        max_iter = 50 * (m + ntot) + 1000
    barred = np.zeros(ntot, dtype=bool)
    bscale = max(1.0, float(np.abs(b).max(initial=0.0)))
    b_work = b
    if perturb and m_ub:
        b_work = b.copy()
        rows = np.flatnonzero(sign[:m_ub] > 0)
        b_work[rows] += 1e-9 * bscale * (1.0 + (rows * 0.6180339887498949) % 1.0)
    tab = _Tableau(A, b_work, basis, barred, tol)

    if needs_art.size:
        c1 = np.zeros(ntot)
        c1[art_cols] = 1.0
        tab.set_costs(c1)
        status = tab.run(max_iter)
        if status == "iteration_limit":
            return LPResult(None, np.nan, status, None, None, tab.iterations)
        if -tab.T[-1, -1] > 1e-8 * bscale:
            return LPResult(None, np.nan, "infeasible", None, None, tab.iterations)
        # drive zero-level artificials out of the basis where possible
        art_set = set(art_cols.tolist())
        for r in range(m):
            if tab.basis[r] in art_set:
                row = tab.T[r, :ns + m_ub]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size:
                    tab.pivot(r, int(cand[np.argmax(np.abs(row[cand]))]))
        barred[art_cols] = True

    c2 = np.zeros(ntot)
    c2[:ns] = cs
    tab.set_costs(c2)
    status = tab.run(max_iter)
    if status != "optimal":
        return LPResult(None, np.nan, status, None, None, tab.iterations)

    B = A[:, tab.basis]
    try:
        xb = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, c2[tab.basis])
    except np.linalg.LinAlgError:
        xb = tab.T[:m, -1].copy()
        y = np.linalg.lstsq(B.T, c2[tab.basis], rcond=None)[0]
    if b_work is not b and xb.min(initial=0.0) < -1e-9 * bscale:
        return solve_lp(c, A_ub, b_ub, A_eq, b_eq, free, max_iter, tol, perturb=False)
    z = np.zeros(ntot)
    z[tab.basis] = np.maximum(xb, 0.0)
    x = z[:n].copy()
    x[free_idx] -= z[n:ns]
    marg = y * sign
    return LPResult(x, float(c @ x), "optimal", marg[:m_ub], marg[m_ub:], tab.iterations)
