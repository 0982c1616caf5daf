"""Norms, duals and Rademacher type on small l_p spaces."""
# %%
import numpy as np

from hellyapprox import NormSpec, dual_norm, norm, norming_functional
from hellyapprox.normed_space import rademacher_average, type_constant_tabulated, type_lower_bound

x = np.array([3.0, -4.0])
for p in (1, 1.5, 2, 4, "inf"):
    space = NormSpec(2, p)
    psi = norming_functional(x, space)
    print(f"{str(space):>10}  ||x|| = {norm(x, space):.4f}  ||psi||_* = {dual_norm(psi, space):.4f}"
          f"  <psi, x> = {psi @ x:.4f}")

# %% Type-2 ratios: the average norm of random sign sums over the l_2 size
# of the summands.  In l_1^2 the two basis vectors already push the ratio to sqrt(2).
E = np.eye(2)
for p in (1, 2, 4):
    space = NormSpec(2, p)
    avg = rademacher_average(E, 2, space)
    est = type_lower_bound(E, 2, space)
    print(f"{str(space):>8}  E||sum eps_i e_i|| = {avg.value:.4f}  ratio = {est.sample_ratio:.4f}")

# %% Random vector sets never beat the tabulated constants.
gen = np.random.default_rng(0)
for p in (2, 4):
    space = NormSpec(6, p)
    table = type_constant_tabulated(space, 2).constant
    ratios = [type_lower_bound(gen.normal(size=(6, 6)), 2, space).sample_ratio for _ in range(200)]
    print(f"{space}: largest sampled ratio {max(ratios):.4f}, table {table:.4f}")
