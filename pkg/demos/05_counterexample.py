"""The l_inf^{2k} family: every k sets meet in the unit ball, yet no point is close to all."""
# %%
from hellyapprox import build_linf_counterexample, minimize_max_distance, verify_kwise_intersection
from hellyapprox.counterexample import Embedding, a_k, exact_check, transfer_counterexample
from hellyapprox.helly import verify_lower_bound

print(" k   a_k      solver   k-wise  certificate")
for k in range(1, 5):
    inst = build_linf_counterexample(k)
    assert all(exact_check(k).values())
    kwise = verify_kwise_intersection(inst.family, k, witnesses=inst.witnesses).all_passed
    out = minimize_max_distance(inst.family)
    print(f"{k:2d}  {a_k(k):.5f}  {out.objective:.5f}  {kwise!s:6}  "
          f"{verify_lower_bound(inst.family, inst.certificate())}")

# %% Moving the construction through an embedding; the identity map gives it back.
res = transfer_counterexample(2, Embedding.identity(2), delta=1e-9)
print("transferred bound:", res.certificate.bound)
print("worst realization slack:", max(res.slack.values()))
