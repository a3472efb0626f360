"""
From finitely many investors to the binomial model
==================================================

Keep the group fractions fixed and let N grow. The finite-N moments approach
the infinite-investor limit at rate 1/N; with no inactive investors the
limit is the classical binomial model.
"""

from finitebinom import (LimitParams, ModelParams, moment_binomial, moment_limit,
                         moment_multigroup, moment_two_group)

q, f, t, n = (0.3, 0.5), (0.9, 1.1), 20, 2
limit = moment_limit(LimitParams(q, f, t, n))
print(f"limit: {limit:.10f}")

prev = None
for N in (250, 500, 1000, 2000, 4000, 8000):
    p = ModelParams.from_lists(f, [round(qh * N) for qh in q], N)
    err = abs(moment_multigroup(p, t, n) - limit)
    ratio = "" if prev is None else f"  ratio {err / prev:.3f}"
    print(f"N={N:5d}  error {err:.3e}{ratio}")
    prev = err

# binomial model: every investor trades, up with probability q_u
for t in (1, 10, 50):
    print(f"t={t:2d}  E[log return^2] = {moment_binomial(0.3, 1.1, 0.9, t, 2):.6f}")

# large N with float arithmetic still matches exact rationals
a = moment_two_group(300_000, 500_000, 10**6, 1.1, 0.9, 10, 8, backend="float")
b = moment_two_group(300_000, 500_000, 10**6, 1.1, 0.9, 10, 8, backend="rational")
print(f"N=10^6, n=8: float {a:.12e}, rational {b:.12e}")
