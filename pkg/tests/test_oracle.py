import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from finitebinom.errors import BudgetExceeded, InvalidParams
from finitebinom.model import INACTIVE, ModelParams, path_log_return, path_probability
from finitebinom.oracle import (binomial_direct, compound_poisson_moment,
                                count_distribution, enumerate_moment, iter_paths,
                                total_mass)

LOG2 = math.log(2)


def test_worked_example_by_hand():
    p = ModelParams.two_group(1, 1, 3, 2.0, 0.5)
    assert enumerate_moment(p, 2, 1) == 0
    assert enumerate_moment(p, 2, 2) == pytest.approx(2 / 3 * LOG2 ** 2, rel=1e-15)
    # nine raw paths, two of them impossible
    paths = dict(iter_paths(p, 2))
    assert len(paths) == 7
    assert (1, 1) not in paths and (0, 0) not in paths
    assert paths[(1, INACTIVE)] == Fraction(2, 9)


def test_horizon_zero():
    p = ModelParams.two_group(2, 1, 5, 1.5, 0.5)
    for n in range(1, 5):
        assert enumerate_moment(p, 0, n) == 0
    assert list(iter_paths(p, 0)) == [((), 1)]


def test_iter_paths_agrees_with_model():
    p = ModelParams.from_lists([0.5, 0.75, 2.0], [1, 2, 1], 5)
    seen = dict(iter_paths(p, 4))
    for path in itertools.product(p.outcomes(), repeat=4):
        prob = path_probability(p, path)
        assert seen.get(path, Fraction(0)) == prob
    assert total_mass(p, 4) == 1


def test_count_distribution_matches_path_walk():
    p = ModelParams.from_lists([0.5, 2.0], [2, 1], 4)
    law = {}
    for path, prob in iter_paths(p, 5):
        key = tuple(sum(1 for o in path if o == h) for h in range(2))
        law[key] = law.get(key, 0) + prob
    assert count_distribution(p, 5) == law
    m3 = sum(prob * path_log_return(p, path) ** 3 for path, prob in iter_paths(p, 5))
    assert enumerate_moment(p, 5, 3) == pytest.approx(float(m3), rel=1e-12)


def test_mean_closed_form():
    for nu, nd, N in [(1, 1, 3), (3, 0, 4), (1, 2, 6)]:
        p = ModelParams.two_group(nu, nd, N, 1.7, 0.4)
        for t in range(6):
            mean = (nu * math.log(1.7) + nd * math.log(0.4)) * (1 - (1 - 1 / N) ** t)
            assert enumerate_moment(p, t, 1) == pytest.approx(mean, abs=1e-14)


def test_budget(monkeypatch):
    p = ModelParams.two_group(5, 5, 10, 1.5, 0.5)
    with pytest.raises(BudgetExceeded):
        enumerate_moment(p, 12, 2, budget=1000)
    monkeypatch.setenv("FINITEBINOM_ENUM_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        list(iter_paths(p, 5))
    monkeypatch.setenv("FINITEBINOM_ENUM_BUDGET", "1000")
    assert total_mass(p, 5) == 1


def test_binomial_direct_examples():
    assert binomial_direct(0.5, 2, 0.5, 1, 2) == pytest.approx(LOG2 ** 2)
    assert binomial_direct(1, 3.0, 0.5, 7, 1) == pytest.approx(7 * math.log(3))
    assert binomial_direct(0, 3.0, 0.5, 7, 2) == pytest.approx((7 * math.log(0.5)) ** 2)
    with pytest.raises(InvalidParams):
        binomial_direct(1.2, 2, 0.5, 3, 1)


def test_compound_poisson_examples():
    assert compound_poisson_moment([Fraction(3, 2)], [Fraction(1, 3)], 1) == Fraction(1, 2)
    assert compound_poisson_moment([1], [1], 2) == 2
    lam, r = [1, 4], [Fraction(-1, 5), Fraction(1, 10)]
    got = [compound_poisson_moment(lam, r, n) for n in range(1, 5)]
    assert got == [Fraction(1, 5), Fraction(3, 25), Fraction(13, 250), Fraction(97, 2500)]
    assert [float(x) for x in got] == pytest.approx([0.2, 0.12, 0.052, 0.0388], rel=1e-15)
    flt = [compound_poisson_moment([1.0, 4.0], [-0.2, 0.1], n) for n in range(1, 5)]
    assert flt == pytest.approx([0.2, 0.12, 0.052, 0.0388], rel=1e-13)


def test_compound_poisson_against_sampling():
    rng = np.random.default_rng(2024)
    m = 400_000
    x = -0.2 * rng.poisson(1.0, m) + 0.1 * rng.poisson(4.0, m)
    for n, ref in enumerate([0.2, 0.12, 0.052, 0.0388], 1):
        sample = x ** n
        se = sample.std(ddof=1) / math.sqrt(m)
        assert abs(sample.mean() - ref) < 5 * se


def test_compound_poisson_validation():
    with pytest.raises(InvalidParams):
        compound_poisson_moment([0, 1], [0.1, 0.2], 2)
    with pytest.raises(ValueError):
        compound_poisson_moment([1], [0.1, 0.2], 2)
