"""Empirical mean radii against the closed-form bounds, as CSV."""
# %%
import sys

from hellyapprox import ExperimentConfig, NormSpec, run_sweep
from hellyapprox.harness import format_rows

cfg = ExperimentConfig(NormSpec(10, 2), [1, 2, 4, 8], instances=3, bound="euclidean", extra=2, timing=False)
sys.stdout.write(format_rows(run_sweep(cfg), "csv"))

# %% l_3 against the type bound with the tabulated constant.
cfg = ExperimentConfig(NormSpec(10, 3), [1, 2, 4, 8], instances=3, extra=2, timing=False)
sys.stdout.write(format_rows(run_sweep(cfg), "csv"))

# %% The counterexample rows stay above k/(2k-1).
cfg = ExperimentConfig(NormSpec(1, "inf"), [1, 2, 3], mode="counterexample_check", timing=False)
sys.stdout.write(format_rows(run_sweep(cfg), "csv"))
