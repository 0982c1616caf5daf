import numpy as np
import pytest
from scipy.optimize import linprog

from hellyapprox.lp import solve_lp


def random_lp(gen, m, n, n_eq=0, n_free=0):
    # feasible by construction (x0 satisfies everything), bounded by a box row
    x0 = gen.uniform(0, 1, n)
    A = gen.normal(size=(m, n))
    b = A @ x0 + gen.uniform(0, 1, m)
    A = np.vstack([A, np.ones(n), -np.ones(n)])
    b = np.concatenate([b, [np.abs(x0).sum() + 5], [np.abs(x0).sum() + 5]])
    A_eq = gen.normal(size=(n_eq, n)) if n_eq else None
    b_eq = A_eq @ x0 if n_eq else None
    c = gen.normal(size=n)
    free = np.arange(n_free) if n_free else None
    if n_free:
        # keep free variables bounded with a box on both signs
        box = np.zeros((2 * n_free, n))
        box[np.arange(n_free), np.arange(n_free)] = 1
        box[n_free + np.arange(n_free), np.arange(n_free)] = -1
        A = np.vstack([A, box])
        b = np.concatenate([b, np.full(2 * n_free, 10.0)])
    return c, A, b, A_eq, b_eq, free


def scipy_bounds(n, free):
    bounds = [(0, None)] * n
    for i in (free if free is not None else []):
        bounds[i] = (None, None)
    return bounds


@pytest.mark.parametrize("seed", range(60))
def test_matches_highs(seed):
    gen = np.random.default_rng(seed)
    m, n = int(gen.integers(1, 12)), int(gen.integers(1, 10))
    n_eq = int(gen.integers(0, min(3, n)))
    n_free = int(gen.integers(0, n + 1))
    c, A, b, A_eq, b_eq, free = random_lp(gen, m, n, n_eq, n_free)
    ours = solve_lp(c, A, b, A_eq, b_eq, free=free)
    ref = linprog(c, A, b, A_eq, b_eq, bounds=scipy_bounds(n, free), method="highs")
    assert ref.status == 0 and ours.success
    assert abs(ours.fun - ref.fun) <= 1e-8 * (1 + abs(ref.fun))
    assert np.all(A @ ours.x <= b + 1e-8)
    if A_eq is not None:
        assert np.allclose(A_eq @ ours.x, b_eq, atol=1e-8)
    # strong duality through the marginals
    dual = ours.ineq_marginals @ b + (ours.eq_marginals @ b_eq if A_eq is not None else 0.0)
    assert abs(dual - ours.fun) <= 1e-7 * (1 + abs(ours.fun))


def test_degenerate_zero_rhs():
    # many ties in the ratio test; the answer is 0
    gen = np.random.default_rng(5)
    A = gen.normal(size=(40, 8))
    res = solve_lp(np.ones(8), A, np.zeros(40))
    assert res.success and abs(res.fun) <= 1e-12


def test_infeasible():
    res = solve_lp([1.0], [[1.0]], [-1.0])
    assert res.status == "infeasible"


def test_unbounded():
    res = solve_lp([-1.0], [[-1.0]], [0.0])
    assert res.status == "unbounded"


def test_shape_errors():
    with pytest.raises(ValueError):
        solve_lp([1.0, 2.0], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        solve_lp([1.0], [[1.0]], [1.0, 2.0])


def test_deterministic():
    gen = np.random.default_rng(9)
    c, A, b, *_ = random_lp(gen, 10, 6)
    r1, r2 = solve_lp(c, A, b), solve_lp(c, A, b)
    assert np.array_equal(r1.x, r2.x)
