"""
Monte Carlo against the exact moments
=====================================

Simulate a market with 100 investors and compare the sample moments of the
log return with the closed form. Runs are reproducible: the same seed gives
the same numbers regardless of how many threads do the work.
"""

import numpy as np

from finitebinom import ModelParams, SimConfig, estimate_moments, moment_multigroup
from finitebinom.simulator import simulate_batch

params = ModelParams.from_lists(factors=[0.9, 1.1], counts=[30, 50], total=100)
t = 40

cfg = SimConfig(params, horizon=t, num_paths=200_000, max_order=4, seed=7)
res = estimate_moments(cfg, workers=4)

print(" n      exact        sample      z")
for n, (m, se) in enumerate(zip(res.moments, res.standard_errors), 1):
    exact = moment_multigroup(params, t, n)
    print(f"{n:2d}  {exact: .6e}  {m: .6e}  {(m - exact) / se:+.2f}")

# a histogram of terminal log returns, as text
x = simulate_batch(params, t, seed=7, start=0, stop=50_000)
hist, edges = np.histogram(x, bins=12)
for h, lo in zip(hist, edges):
    print(f"{lo:+.3f} {'#' * int(60 * h / hist.max())}")
