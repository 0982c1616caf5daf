"""The nine acceptance criteria, each at its stated tolerance and time budget.

Every test records ``(passed, seconds, detail)`` in the session log; the
conftest hook prints one line per criterion after the run.
"""

import math
import time

import numpy as np

from hellyapprox.caratheodory import brute_force_best_tuple, colorful_maurey_sample, maurey_sample
from hellyapprox.counterexample import (Embedding, a_k, build_linf_counterexample, exact_check, float_check,
                                        transfer_counterexample)
from hellyapprox.harness import ExperimentConfig, run_sweep
from hellyapprox.helly import (certificate_to_lower, minimize_max_distance, verify_kwise_intersection,
                               verify_lower_bound)
from hellyapprox.instances import generate_rainbow_instance, random_cloud, random_color_group
from hellyapprox.normed_space import (INF, NormSpec, default_type_exponent, type_constant_tabulated,
                                      type_lower_bound)
from hellyapprox.polytope import VPolytope, distance
from oracles import mesh_min_objective, simplex_grid_distance

EXPONENTS = [1, 1.5, 2, 3, INF]


class Criterion:
    """Times a criterion, collects failures, and logs the verdict."""

    def __init__(self, log, number, budget):
        self.log, self.number, self.budget = log, number, budget
        self.failures = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def fail(self, what):
        self.failures.append(what)

    def __exit__(self, exc_type, exc, tb):
        seconds = time.perf_counter() - self.t0
        if exc_type is not None:
            self.fail(f"raised {exc_type.__name__}: {exc}")
        if seconds > self.budget:
            self.fail(f"took {seconds:.1f} s, budget {self.budget} s")
        detail = "; ".join(self.failures[:3]) if self.failures else ""
        self.log[self.number] = (not self.failures, seconds, detail)
        return False

    def check(self):
        assert not self.failures, self.failures


def test_criterion_1_counterexample(acceptance_log):
    with Criterion(acceptance_log, 1, 30) as c:
        for k in range(1, 6):
            if not all(exact_check(k).values()):
                c.fail(f"k={k}: exact invariants")
            inst = build_linf_counterexample(k)
            if not all(float_check(inst).values()):
                c.fail(f"k={k}: float invariants")
            rep = verify_kwise_intersection(inst.family, k, witnesses=inst.witnesses)
            if not rep.all_passed or len(rep.subsets) != math.comb(2 * k, k):
                c.fail(f"k={k}: k-wise intersection")
            out = minimize_max_distance(inst.family)
            if out.objective < a_k(k) - 1e-6:
                c.fail(f"k={k}: objective {out.objective} below {a_k(k)}")
    c.check()


def test_criterion_2_weak_duality(acceptance_log):
    tol = 1e-6
    with Criterion(acceptance_log, 2, 120) as c:
        certified = meshed = attempts = 0
        while certified < 100:
            i = attempts
            attempts += 1
            if attempts > 300:
                c.fail(f"only {certified} certified instances in 300 attempts")
                break
            dim, p, k = 1 + i % 10, EXPONENTS[(i // 10) % 5], 1 + i % 3
            fam = generate_rainbow_instance(NormSpec(dim, p), k, [2] * k, seed=1000 + i, extra=2).family
            out = minimize_max_distance(fam, tol=tol)
            if not out.certified:
                continue
            certified += 1
            low = certificate_to_lower(out.certificate, fam)
            if not verify_lower_bound(fam, low, tol=tol):
                c.fail(f"instance {i}: certificate does not verify")
            if low.bound > out.objective + tol:
                c.fail(f"instance {i}: bound {low.bound} above objective {out.objective}")
            if dim <= 3:
                meshed += 1
                best, _, _ = mesh_min_objective(fam, out.objective - 10 * tol)
                if best < out.objective - 10 * tol:
                    c.fail(f"instance {i}: mesh point beats the center ({best} < {out.objective})")
        if meshed < 20:
            c.fail(f"only {meshed} instances were mesh-checked")
    c.check()


def _sweep_criterion(log, number, p, bound, slack):
    with Criterion(log, number, 180) as c:
        cfg = ExperimentConfig(NormSpec(15, p), [1, 2, 4, 8, 16], instances=10, extra=2, bound=bound,
                               seed=number, timing=False)
        rows = run_sweep(cfg)
        if len(rows) != 50:
            c.fail(f"{len(rows)} rows")
        for r in rows:
            if r.empirical > r.bound + slack:
                c.fail(f"k={r.k} instance {r.index}: {r.empirical} > {r.bound}")
    c.check()


def test_criterion_3_euclidean_bound(acceptance_log):
    _sweep_criterion(acceptance_log, 3, 2, "euclidean", 1e-4)


def test_criterion_4_general_bound(acceptance_log):
    _sweep_criterion(acceptance_log, 4, 3, "type", 0.0)


def test_criterion_5_maurey_vs_oracle(acceptance_log):
    with Criterion(acceptance_log, 5, 60) as c:
        gen = np.random.default_rng(5)
        matches = 0
        for i in range(200):
            dim, m, k = int(gen.integers(1, 11)), int(gen.integers(2, 9)), int(gen.integers(1, 5))
            space = NormSpec(dim, 2)
            cloud = random_cloud(space, m, seed=i)
            best = maurey_sample(cloud, k, 256, seed=i, space=space).norm
            oracle = brute_force_best_tuple(cloud, space, k=k).norm
            if best < oracle - 1e-12:
                c.fail(f"instance {i}: sample {best} undercuts oracle {oracle}")
            matches += abs(best - oracle) <= 1e-12
            short = maurey_sample(cloud, k, 64, seed=i, space=space).norm
            if short > 2 / math.sqrt(k):
                c.fail(f"instance {i}: best-of-64 {short} > 2/sqrt({k})")
        if matches < 190:
            c.fail(f"oracle matched on {matches}/200")
    c.check()


def test_criterion_6_colorful_sampler(acceptance_log):
    with Criterion(acceptance_log, 6, 60) as c:
        gen = np.random.default_rng(6)
        for i in range(100):
            p = [1.5, 2, 3, 4, INF][i % 5]
            space = NormSpec(int(gen.integers(1, 11)), p)
            k = int(gen.integers(1, 17))
            group = random_color_group(space, k, gen.integers(1, 7, size=k), seed=i)
            anchor = group.anchors.sum(axis=0)
            if np.abs(anchor).max() > 1e-12:
                c.fail(f"instance {i}: anchors sum to {anchor}")
            tp = default_type_exponent(space)
            T = type_constant_tabulated(space, tp)
            res = colorful_maurey_sample(group, 64, seed=i, space=space)
            bound = 2 * T.constant * k ** (-1 + 1 / float(tp))
            if res.norm > bound:
                c.fail(f"instance {i}: {res.norm} > {bound}")
    c.check()


def test_criterion_7_type_estimates(acceptance_log):
    with Criterion(acceptance_log, 7, 60) as c:
        gen = np.random.default_rng(7)
        for i in range(500):
            p = 2 if i % 2 == 0 else 4
            space = NormSpec(int(gen.integers(1, 9)), p)
            table = type_constant_tabulated(space, 2).constant
            V = gen.normal(size=(int(gen.integers(1, 9)), space.dim)) * gen.exponential(size=(1, 1))
            est = type_lower_bound(V, 2, space)
            if est.sample_ratio > table + 1e-12 or est.constant > table + 1e-12:
                c.fail(f"set {i} in {space}: ratio {est.sample_ratio} > {table}")
        ratio = type_lower_bound(np.eye(2), 2, NormSpec(2, 1)).sample_ratio
        if abs(ratio - math.sqrt(2)) > 1e-12:
            c.fail(f"l_1 pair ratio {ratio}")
    c.check()


def test_criterion_8_distance_oracle(acceptance_log):
    with Criterion(acceptance_log, 8, 120) as c:
        gen = np.random.default_rng(8)
        for i in range(200):
            p = EXPONENTS[i % 5]
            dim, m = int(gen.integers(1, 4)), int(gen.integers(1, 6))
            space = NormSpec(dim, p)
            V = gen.uniform(-1, 1, (m, dim))
            x = gen.uniform(-2, 2, dim)
            res = distance(x, VPolytope(V), space)
            oracle = simplex_grid_distance(x, V, p)
            if abs(res.value - oracle) > 1e-4:
                c.fail(f"instance {i}: {res.value} vs grid {oracle}")
            if res.subgradient is not None:
                gaps = (V - x) @ res.subgradient
                if gaps.max() > -(res.value - 1e-6):
                    c.fail(f"instance {i}: subgradient inequality fails by {gaps.max() + res.value}")
    c.check()


def test_criterion_9_identity_transfer(acceptance_log):
    delta = 1e-9
    with Criterion(acceptance_log, 9, 10) as c:
        for k in (1, 2):
            inst = build_linf_counterexample(k)
            res = transfer_counterexample(k, Embedding.identity(k), delta)
            if not np.allclose(res.certificate.functionals, inst.functionals, atol=1e-15):
                c.fail(f"k={k}: functionals differ")
            if abs(res.certificate.bound - (a_k(k) - delta)) > 1e-15:
                c.fail(f"k={k}: bound {res.certificate.bound}")
            for K, L in zip(res.family.sets, inst.family.sets):
                if K.vertices.shape != L.vertices.shape or not np.allclose(K.vertices, L.vertices, atol=1e-9):
                    c.fail(f"k={k}: sets differ")
                    break
            if not verify_lower_bound(res.family, res.certificate):
                c.fail(f"k={k}: transferred certificate does not verify")
    c.check()
