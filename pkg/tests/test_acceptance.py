"""Acceptance criteria 1-9. Each test records a PASS/FAIL line that the
terminal summary prints after the run."""

import itertools
import math
import random
from fractions import Fraction

from finitebinom.errors import InvalidFit, SingularHankel
from finitebinom.fitter import ROOT_CONDITIONS, fit, map_parameters
from finitebinom.model import ModelParams
from finitebinom.moments import (LimitParams, moment_binomial, moment_limit,
                                 moment_multigroup, moment_polynomial, moment_two_group)
from finitebinom.oracle import (binomial_direct, compound_poisson_moment,
                                enumerate_moment, enumerate_polynomial)
from finitebinom.simulator import SimConfig, estimate_moments

FACTORS = (Fraction(1, 2), Fraction(3, 4), Fraction(4, 3), Fraction(2))


def grid_params():
    for g in (1, 2, 3):
        for N in range(1, 5):
            for counts in itertools.product(range(N + 1), repeat=g):
                if sum(counts) <= N:
                    yield counts, N


def test_criterion_1_oracle_equivalence(record):
    cases = mismatches = 0
    for counts, N in grid_params():
        g = len(counts)
        factor_sets = list(itertools.combinations(FACTORS, g))
        for t in range(0, 9):
            for n in range(1, 6):
                base = ModelParams.from_lists(factor_sets[0], counts, N)
                sym = moment_polynomial(base, t, n, "rational")
                ok = sym == enumerate_polynomial(base, t, n)
                for fs in factor_sets:
                    p = ModelParams.from_lists(fs, counts, N)
                    cases += 1
                    if not ok or moment_multigroup(p, t, n, "rational") != enumerate_moment(p, t, n):
                        mismatches += 1
    record(1, mismatches == 0, f"{cases} grid cases, {mismatches} mismatches")
    assert mismatches == 0


def test_criterion_2_worked_instance(record):
    p = ModelParams.two_group(1, 1, 3, 2, Fraction(1, 2))
    target = 2 / 3 * math.log(2) ** 2
    exact = [moment_multigroup(p, 2, n, "rational") for n in (1, 2)]
    two = [moment_two_group(1, 1, 3, 2.0, 0.5, 2, n) for n in (1, 2)]
    oracle = [enumerate_moment(p, 2, n) for n in (1, 2)]
    mc = estimate_moments(SimConfig(p, 2, 10**6, 2, 20240101))
    ok = (exact[0] == 0 and oracle[0] == 0 and abs(two[0]) < 1e-15
          and math.isclose(exact[1], target, rel_tol=1e-15)
          and math.isclose(oracle[1], target, rel_tol=1e-15)
          and math.isclose(two[1], target, rel_tol=1e-14)
          and round(target, 6) == 0.320302
          and abs(mc.moments[1] - target) <= 4 * mc.standard_errors[1]
          and abs(mc.moments[0]) <= 4 * mc.standard_errors[0])
    z = (mc.moments[1] - target) / mc.standard_errors[1]
    record(2, ok, f"m2={exact[1]:.6f}, oracle={oracle[1]:.6f}, MC z={z:+.2f}")
    assert ok


def test_criterion_3_binomial_consistency(record):
    u, d = 1.1, 0.9
    worst = 0.0
    for q in (0, 0.3, 0.5, 1):
        for t in range(0, 51):
            for n in range(1, 7):
                a = moment_binomial(q, u, d, t, n)
                b = binomial_direct(q, u, d, t, n)
                if b == 0:
                    assert a == 0
                    continue
                worst = max(worst, abs(a / b - 1))
    record(3, worst <= 1e-12, f"worst relative error {worst:.2e}")
    assert worst <= 1e-12


def test_criterion_4_limit_convergence(record):
    q, f, t = (0.3, 0.5), (0.9, 1.1), 20
    ratios = []
    for n in range(1, 5):
        lim = moment_limit(LimitParams(q, f, t, n))
        err = {}
        for N in (2000, 4000):
            counts = [round(qh * N) for qh in q]
            p = ModelParams.from_lists(f, counts, N)
            err[N] = abs(moment_multigroup(p, t, n) - lim)
        ratios.append(err[4000] / err[2000])
    ok = all(r <= 0.625 for r in ratios)
    record(4, ok, "error ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    assert ok


M5 = [compound_poisson_moment([1, 4], [Fraction(-1, 5), Fraction(1, 10)], n) for n in range(1, 5)]


def _draw(rng, g):
    while True:
        roots = sorted(rng.choice((-1, 1)) * rng.uniform(0.01, 1) for _ in range(g))
        if all(b - a >= 0.05 for a, b in zip(roots, roots[1:])):
            return [Fraction(r) for r in roots], [Fraction(rng.uniform(0.1, 10)) for _ in range(g)]


def test_criterion_5_fitter_round_trip(record):
    assert [float(x) for x in M5] == [0.2, 0.12, 0.052, 0.0388]
    res = fit([float(x) for x in M5], 2, 10**6)
    ok = (all(abs(a - b) <= 1e-9 for a, b in zip(res.roots, (-0.2, 0.1)))
          and all(abs(a - b) <= 1e-8 for a, b in zip(res.weights, (1, 4))))
    for n in range(1, 5):
        back = compound_poisson_moment(res.weights, res.roots, n)
        ok &= math.isclose(back, float(M5[n - 1]), rel_tol=1e-9)
    rng = random.Random(5)
    failures = 0
    for i in range(100):
        g = 1 + i % 3
        roots, lams = _draw(rng, g)
        m = [compound_poisson_moment(lams, roots, n) for n in range(1, 2 * g + 1)]
        try:
            r = fit(m, g, 10**6)
        except Exception:
            failures += 1
            continue
        good = all(math.isclose(a, float(b), rel_tol=1e-9) for a, b in zip(r.roots, roots))
        good &= all(math.isclose(a, float(b), rel_tol=1e-8) for a, b in zip(r.weights, lams))
        good &= all(math.isclose(compound_poisson_moment(r.weights, r.roots, n), float(m[n - 1]),
                                 rel_tol=1e-9) for n in range(1, 2 * g + 1))
        failures += not good
    ok &= failures == 0
    record(5, ok, f"example roots {res.roots}, {failures}/100 random failures")
    assert ok


def test_criterion_6_mapped_model_limit(record):
    res = fit([float(x) for x in M5], 2, 10**6)
    errs = {}
    for a in (10**3, 10**5):
        params, t = map_parameters(res.roots, res.weights, a)
        errs[a] = [abs(moment_multigroup(params, t, n) / float(M5[n - 1]) - 1) for n in range(1, 5)]
    ok = all(e5 < e3 for e3, e5 in zip(errs[10**3], errs[10**5]))
    detail = ", ".join(f"n={n}: {e3:.1e} -> {e5:.1e}"
                       for n, (e3, e5) in enumerate(zip(errs[10**3], errs[10**5]), 1))
    record(6, ok, detail)
    assert ok


def test_criterion_7_validity_rejection(record):
    normal = single = False
    try:
        fit([0, 1, 0, 3], 2, 10**6)
    except InvalidFit as exc:
        normal = any(c in ROOT_CONDITIONS for c in exc.report.failed)
    lam, r = Fraction(3), Fraction(1, 4)
    m = [compound_poisson_moment([lam], [r], n) for n in range(1, 5)]
    try:
        fit(m, 2, 10**6)
    except SingularHankel:
        single = True
    record(7, normal and single, f"normal rejected={normal}, single Poisson singular={single}")
    assert normal and single


def test_criterion_8_cancellation(record):
    a = moment_two_group(300_000, 500_000, 10**6, 1.1, 0.9, 10, 8, "float")
    b = moment_two_group(300_000, 500_000, 10**6, 1.1, 0.9, 10, 8, "rational")
    rel = abs(a / b - 1)
    record(8, rel <= 1e-8, f"relative difference {rel:.2e}")
    assert rel <= 1e-8


def test_criterion_9_simulator_determinism(record):
    p = ModelParams.from_lists([0.5, 0.75, 2.0], [3, 5, 4], 20)
    cfg = SimConfig(p, 15, 300_000, 6, 987654321)
    one = estimate_moments(cfg, workers=1, batch_size=1 << 14)
    runs = {w: estimate_moments(cfg, workers=w, batch_size=1 << 14) for w in (1, 4, 16)}
    ok = all(r == one for r in runs.values())
    record(9, ok, f"workers {sorted(runs)} bit-identical to a repeated 1-worker run: {ok}")
    assert ok
