"""A colorful family, its best center, and the certificate behind it."""
# %%
import numpy as np

from hellyapprox import (NormSpec, certificate_to_lower, dual_type_estimate, euclidean_bound,
                         generate_rainbow_instance, minimize_max_distance, upper_bound, verify_lower_bound)

space = NormSpec(5, 2)
inst = generate_rainbow_instance(space, 3, [2, 2, 2], seed=11, extra=3)
fam = inst.family
print(f"{fam.k} colors, {sum(len(c) for c in fam.colors)} sets, {len(inst.witnesses)} witnesses")

# %%
out = minimize_max_distance(fam)
print("center      ", np.round(out.center, 4))
print("radii       ", np.round(out.radii, 4))
print("mean radius ", round(out.objective, 6), " certified:", out.certified,
      f" residual {out.certificate_residual:.1e}")

# %% The certificate turns into functionals that anybody can check.
low = certificate_to_lower(out.certificate, fam)
print("lower bound ", round(low.bound, 6), " verifies:", verify_lower_bound(fam, low, tol=1e-6))

# %% Compare with the two closed-form bounds.
print("1/sqrt(k)   ", euclidean_bound(fam.k))
print("type bound  ", upper_bound(dual_type_estimate(space), fam.k))
