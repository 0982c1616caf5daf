"""Distance from a point to a polytope, with the subgradient that certifies it."""
# %%
import numpy as np

from hellyapprox import NormSpec, VPolytope, distance, support_value

triangle = VPolytope([[1.0, 0.0], [2.0, 1.0], [1.0, 2.0]])
x = np.array([-1.0, -0.5])

for p in (1, 1.5, 2, 3, "inf"):
    space = NormSpec(2, p)
    res = distance(x, triangle, space)
    psi = res.subgradient
    # psi is a dual-unit functional with <psi, x> - h_K(psi) equal to the distance
    print(f"{str(space):>9}  dist = {res.value:.6f}  nearest = {np.round(res.nearest, 4)}"
          f"  psi = {np.round(psi, 4)}  duality gap = {psi @ x - support_value(triangle, psi) - res.value:.1e}")

# %% The same query one point at a time along a line through the triangle.
space = NormSpec(2, 2)
for t in np.linspace(-1, 3, 9):
    y = np.array([t, t])
    print(f"t = {t:5.2f}  dist = {distance(y, triangle, space).value:.4f}")
