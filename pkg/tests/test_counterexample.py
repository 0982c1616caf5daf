import math

import numpy as np
import pytest

from hellyapprox.counterexample import (Embedding, RealizationError, a_k, build_linf_counterexample, colex_subsets,
                                        exact_check, float_check, transfer_counterexample)
from hellyapprox.helly import Family, minimize_max_distance, verify_kwise_intersection, verify_lower_bound
from hellyapprox.normed_space import INF, NormSpec
from hellyapprox.polytope import VPolytope


def test_k1_explicit():
    inst = build_linf_counterexample(1)
    assert inst.a_k == 1.0
    assert np.array_equal(inst.functionals, [[0.5, -0.5], [-0.5, 0.5]])
    assert np.array_equal(inst.family.sets[0].vertices, [[-1.0, 1.0]])
    assert np.array_equal(inst.family.sets[1].vertices, [[1.0, -1.0]])


def test_k2_w_norm():
    inst = build_linf_counterexample(2)
    w = inst.functionals / inst.a_k
    assert np.allclose(np.abs(w).sum(axis=1), 1.5, atol=1e-15)
    assert abs(inst.a_k - 2 / 3) <= 1e-16


@pytest.mark.parametrize("k", range(1, 7))
def test_exact_invariants(k):
    assert all(exact_check(k).values())


@pytest.mark.parametrize("k", range(1, 11))
def test_float_invariants(k):
    inst = build_linf_counterexample(k)
    assert all(float_check(inst).values())
    assert np.abs(inst.functionals.sum(axis=0)).max() <= 1e-12


def test_k_out_of_range():
    for k in (0, 11, 2.0):
        with pytest.raises(ValueError):
            build_linf_counterexample(k)
    with pytest.raises(ValueError):
        exact_check(7)


def test_colex_order():
    assert colex_subsets(4, 2) == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    assert list(build_linf_counterexample(2).witnesses) == colex_subsets(4, 2)


@pytest.mark.parametrize("k", range(1, 6))
def test_lower_bound_and_intersections(k):
    inst = build_linf_counterexample(k)
    assert verify_kwise_intersection(inst.family, k, witnesses=inst.witnesses).all_passed
    assert verify_lower_bound(inst.family, inst.certificate())
    out = minimize_max_distance(inst.family)
    assert out.objective >= a_k(k) - 1e-6


@pytest.mark.parametrize("k, n", [(1, 3), (2, 5), (2, 8)])
def test_padded_embedding_radius(k, n):
    # the construction sits in the first 2k coordinates of l_inf^n
    inst = build_linf_counterexample(k)
    pad = lambda V: np.hstack([V, np.zeros((V.shape[0], n - 2 * k))])
    fam = Family([VPolytope(pad(K.vertices)) for K in inst.family.sets], NormSpec(n, INF))
    out = minimize_max_distance(fam)
    assert out.objective >= 0.5 and out.objective >= a_k(k) - 1e-6


@pytest.mark.parametrize("k", [1, 2, 3])
def test_identity_transfer(k):
    inst = build_linf_counterexample(k)
    res = transfer_counterexample(k, Embedding.identity(k), 1e-9)
    assert np.allclose(res.certificate.functionals, inst.functionals, atol=1e-15)
    assert abs(res.certificate.bound - (a_k(k) - 1e-9)) <= 1e-15
    assert verify_lower_bound(res.family, res.certificate)
    for J, x in res.witnesses.items():
        assert np.abs(x).max() <= 1 + 1e-12
        assert res.slack[J] <= 0
        assert np.max(inst.functionals[list(J)] @ x) <= -a_k(k) + 1e-9


def test_transfer_into_wider_linf():
    T = np.zeros((4, 2))
    T[0, 0] = T[1, 1] = 1.0
    res = transfer_counterexample(1, Embedding(T, 0.0, NormSpec(4, INF)), 1e-9)
    assert abs(res.certificate.bound - (1 - 1e-9)) <= 1e-15
    assert verify_lower_bound(res.family, res.certificate)
    out = minimize_max_distance(res.family)
    assert out.objective >= 1 - 1e-6


def test_transfer_into_l2():
    # columns of norm one in l_2 (the dual of l_2); the image norm is checked
    # against the realization, not assumed
    k = 1
    T = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(RealizationError) as err:
        transfer_counterexample(k, Embedding(T, 0.0, NormSpec(2, 2)), 1e-9)
    assert err.value.gap > 0
    # l_1^2 -> l_2^2 identity has ||T^-1|| = sqrt(2), which eta = sqrt(2) - 1 honors
    res = transfer_counterexample(k, Embedding(T, math.sqrt(2) - 1, NormSpec(2, 2)), 1e-9)
    assert verify_lower_bound(res.family, res.certificate)


def test_transfer_preconditions():
    with pytest.raises(ValueError):
        transfer_counterexample(1, Embedding(np.array([[1.5, 0.0], [0.0, 1.0]]), 0.0, NormSpec(2, INF)), 1e-9)
    with pytest.raises(ValueError):
        transfer_counterexample(1, Embedding(np.array([[1.0, 1.0], [0.0, 0.0]]), 0.0, NormSpec(2, INF)), 1e-9)
    with pytest.raises(ValueError):
        transfer_counterexample(2, Embedding.identity(1), 1e-9)
    with pytest.raises(ValueError):
        transfer_counterexample(1, Embedding.identity(1), 0.0)
    with pytest.raises(ValueError):
        Embedding(np.eye(3), 0.0, NormSpec(3, INF))


def test_embedding_json():
    emb = Embedding(np.eye(4)[:, :2] * 0.5, 0.25, NormSpec(4, 1))
    back = Embedding.from_json(emb.to_json())
    assert np.array_equal(back.matrix, emb.matrix) and back.eta == emb.eta and back.space == emb.space
