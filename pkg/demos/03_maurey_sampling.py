"""Sparse averages that approximate the barycenter (Maurey's empirical method)."""
# %%
import math

import numpy as np

from hellyapprox import NormSpec, brute_force_best_tuple, maurey_sample, random_cloud

space = NormSpec(10, 2)
cloud = random_cloud(space, 8, seed=3)
print("weights:", np.round(cloud.weights, 3))
print("weighted mean norm:", np.linalg.norm(cloud.weights @ cloud.points))

# %% Best of 64 random k-tuples against the 2/sqrt(k) guarantee and the exact optimum.
print(" k   sampled   optimum   2/sqrt(k)")
for k in (1, 2, 3, 4, 6, 8):
    res = maurey_sample(cloud, k, 64, seed=k, space=space)
    opt = brute_force_best_tuple(cloud, space, k=k).norm if k <= 4 else float("nan")
    print(f"{k:2d}  {res.norm:8.4f}  {opt:8.4f}  {2 / math.sqrt(k):8.4f}")

# %% More trials only help.
for trials in (1, 4, 16, 64, 256):
    print(trials, maurey_sample(cloud, 4, trials, seed=0, space=space).norm)
