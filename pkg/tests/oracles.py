"""Independent brute-force oracles used by the tests.

None of these call the package's optimizers; the mesh search only evaluates
distances at fixed points.
"""

import itertools
import math

import numpy as np

from hellyapprox.helly import objective
from hellyapprox.normed_space import INF, _pnorm_rows


def compositions(m, N):
    """All nonnegative integer vectors of length m summing to N."""
    out = []
    for bars in itertools.combinations(range(N + m - 1), m - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(N + m - 1 - prev - 1)
        out.append(parts)
    return np.array(out, dtype=float)


def _local_offsets(m, K):
    """Offsets of a (2K+1)^(m-1) box grid in the first m-1 weights; the last weight absorbs the sum."""
    g = np.arange(-K, K + 1) / K
    B = np.array(list(itertools.product(g, repeat=m - 1)))
    return np.hstack([B, -B.sum(axis=1, keepdims=True)])


def _zoom_grid(x, V, p, N, K, min_step):
    m = V.shape[0]
    if m == 1:
        return float(_pnorm_rows(x - V[0], p))
    L = compositions(m, N) / N
    vals = _pnorm_rows(x - L @ V, p)
    i = int(np.argmin(vals))
    lam, best = L[i], float(vals[i])
    D = _local_offsets(m, K)
    h = 2.0 / N
    while h > min_step:
        # points past a face are pulled back onto it, so moves along faces survive
        C = np.maximum(lam + h * D, 0.0)
        C /= C.sum(axis=1, keepdims=True)
        v = _pnorm_rows(x - C @ V, p)
        j = int(np.argmin(v))
        if v[j] < best:
            lam, best = C[j], float(v[j])
        else:
            h /= 2
    return best


GRID_SIZES = {2: (1000, 50), 3: (200, 20), 4: (40, 6)}


def _in_simplex(x, S):
    """Exact membership of x in a full-dimensional simplex via barycentric coordinates."""
    A = np.vstack([S.T, np.ones(S.shape[0])])
    if abs(np.linalg.det(A)) < 1e-12:
        return False
    lam = np.linalg.solve(A, np.append(x, 1.0))
    return bool(lam.min() >= -1e-12)


def simplex_grid_distance(x, V, p, min_step=1e-9):
    """min over the simplex of ||x - V^T lam||_p by dense grids on sub-simplices.

    A nearest point of conv(V) to an outside x lies on a face, so it is a
    convex combination of at most d vertices (d = dimension); each such
    sub-simplex gets a uniform grid followed by zoomed local grids (a full
    box grid of half-width h around the incumbent; h halves when nothing
    improves).  Points inside conv(V) are detected exactly: they lie in some
    simplex of d + 1 vertices.  The result is an upper bound on the distance.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    x = np.asarray(x, dtype=float)
    m, d = V.shape
    if m > d:
        for S in itertools.combinations(range(m), d + 1):
            if _in_simplex(x, V[list(S)]):
                return 0.0
    best = math.inf
    for size in range(1, min(m, d) + 1):
        N, K = GRID_SIZES.get(size, (1, 1))
        for S in itertools.combinations(range(m), size):
            best = min(best, _zoom_grid(x, V[list(S)], p, N, K, min_step))
    return best


def mesh_min_objective(family, threshold, mesh=0.05, radius=2.0, budget=200_000):
    """Smallest objective over mesh points in the ``radius`` ball, as far as it matters.

    Branch and bound over dyadic blocks of mesh points: a block is discarded
    once ``F(center) - Lip * (block radius) >= threshold`` (F is 1-Lipschitz),
    so the return value is exact whenever it is below ``threshold`` and
    otherwise only certified to be ``>= threshold``.  Returns
    ``(best_value_found, best_point, evaluations)``.
    """
    space = family.space
    d, p = space.dim, space.p
    dim_factor = d ** (0.0 if p == INF else 1.0 / float(p))
    n = int(round(radius / mesh))
    best = (math.inf, None)
    evals = 0
    stack = [(np.full(d, -n), np.full(d, n))]
    while stack:
        lo, hi = stack.pop()
        # nearest point of the block to the origin, coordinatewise
        near = np.clip(0, lo, hi) * mesh
        if float(_pnorm_rows(near, p)) > radius + 1e-12:
            continue
        mid = (lo + hi) // 2
        c = mid * mesh
        half = np.maximum(mid - lo, hi - mid).max() * mesh
        if float(_pnorm_rows(c, p)) <= radius + 1e-12 or half > 0:
            fc = objective(c, family)
            evals += 1
            if evals > budget:
                raise RuntimeError("mesh search budget exhausted")
            if float(_pnorm_rows(c, p)) <= radius + 1e-12 and fc < best[0]:
                best = (fc, c)
            if fc - half * dim_factor >= threshold:
                continue
        if half == 0:
            continue
        # split along every axis with more than one index
        ranges = []
        for a in range(d):
            if lo[a] == hi[a]:
                ranges.append([(lo[a], hi[a])])
            else:
                ranges.append([(lo[a], mid[a]), (mid[a] + 1, hi[a])])
        for combo in itertools.product(*ranges):
            clo = np.array([r[0] for r in combo])
            chi = np.array([r[1] for r in combo])
            if np.any(clo > chi):
                continue
            stack.append((clo, chi))
    return best[0], best[1], evals
