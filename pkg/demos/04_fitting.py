"""
Fitting a market to four moments
================================

Given m_1..m_4 of a log return, find two groups whose price factors and
sizes reproduce them. The moments below come from a compound Poisson law
with rates (1, 4) on jumps (-0.2, 0.1); the fit recovers both.
"""

from finitebinom import fit, moment_multigroup
from finitebinom.errors import InvalidFit
from finitebinom.fitter import map_parameters

m = [0.2, 0.12, 0.052, 0.0388]
res = fit(m, g=2, anchor_count=10**6)
print("log factors:", res.roots)
print("weights    :", res.weights)
print("counts     :", res.mapped_params.counts, "of", res.mapped_params.total_investors)
print("horizon    :", res.mapped_horizon)

# the mapped market only matches in the limit of a large anchor group
for anchor in (10**2, 10**3, 10**4, 10**5):
    params, t = map_parameters(res.roots, res.weights, anchor)
    errs = [abs(moment_multigroup(params, t, n) / m[n - 1] - 1) for n in range(1, 5)]
    print(f"anchor {anchor:>6d}: " + "  ".join(f"{e:.1e}" for e in errs))

# a normal distribution cannot be written this way
try:
    fit([0, 1, 0, 3], g=2, anchor_count=1000)
except InvalidFit as exc:
    print("normal moments rejected:", exc.report.failed)
