import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finitebinom.errors import DistinctnessViolated
from finitebinom.numerics import (FLOAT, RATIONAL, Stirling2Table, binomial,
                                  composition_power_sum, compositions,
                                  falling_factorial, multinomial, stirling2)


def set_partitions(items):
    """All partitions of ``items`` into non-empty blocks (brute force)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def partition_counts(n):
    counts = [0] * (n + 1)
    for p in set_partitions(list(range(n))):
        counts[len(p)] += 1
    return counts


def brute_power_sum(c, m):
    total = 0
    for exps in itertools.product(range(m + 1), repeat=len(c)):
        if sum(exps) == m:
            term = 1
            for cj, e in zip(c, exps):
                term *= cj ** e
            total += term
    return total


def test_binomial_examples():
    assert binomial(5, 2) == 10
    assert binomial(9, 0) == 1
    assert binomial(3, 5) == 0


def test_falling_factorial_examples():
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(7, 0) == 1
    assert falling_factorial(0, 0) == 1
    assert falling_factorial(2, 4) == 0


def test_stirling_examples():
    assert stirling2(4, 2) == 7
    assert all(stirling2(n, n) == 1 for n in range(12))
    assert stirling2(0, 0) == 1
    assert stirling2(5, 0) == 0
    assert stirling2(3, 5) == 0


def test_stirling_6_3_by_enumeration():
    assert partition_counts(6)[3] == 90
    assert stirling2(6, 3) == 90


@pytest.mark.parametrize("n", range(0, 10))
def test_stirling_matches_set_partitions(n):
    counts = partition_counts(n)
    assert [stirling2(n, k) for k in range(n + 1)] == counts


@pytest.mark.parametrize("n", [10, 11, 12])
def test_stirling_matches_set_partitions_large(n):
    # Bell(12) ~ 4.2 million partitions: counted by the size of the block
    # holding element 0 instead of materialising them
    from functools import cache
    from math import comb

    @cache
    def count(m, k):
        # partitions of an m-set into k blocks, choosing the block of element 0
        if m == 0:
            return 1 if k == 0 else 0
        if k == 0:
            return 0
        return sum(comb(m - 1, s) * count(m - 1 - s, k - 1) for s in range(m))

    assert [stirling2(n, k) for k in range(n + 1)] == [count(n, k) for k in range(n + 1)]


def test_stirling_table_recurrence_and_bounds():
    table = Stirling2Table(8)
    for n in range(1, 9):
        for k in range(1, n + 1):
            assert table[n, k] == k * table[n - 1, k] + table[n - 1, k - 1]
    assert table[3, 7] == 0
    with pytest.raises(IndexError):
        table[9, 1]


def test_multinomial_examples():
    assert multinomial([2, 2]) == 6
    assert multinomial([7]) == 1
    assert multinomial([1, 1, 2]) == 12
    assert multinomial([]) == 1


def test_stirling_falling_factorial_identity():
    for x in range(0, 11):
        for n in range(0, 9):
            assert sum(stirling2(n, k) * falling_factorial(x, k) for k in range(n + 1)) == x ** n


def test_compositions_colex_order():
    comps = list(compositions(2, 2))
    assert comps == [(2, 0), (1, 1), (0, 2)]
    assert len(list(compositions(5, 3))) == binomial(7, 2)
    assert all(sum(c) == 5 for c in compositions(5, 3))


def test_power_sum_examples():
    assert composition_power_sum([2, 3], 2) == 19
    assert composition_power_sum([Fraction(5, 7)], 4) == Fraction(5, 7) ** 4
    # 73 (cubes) + 74 (squares times another entry) + 8 (1*2*4)
    assert brute_power_sum([1, 2, 4], 3) == 155
    assert composition_power_sum([1, 2, 4], 3) == 155
    assert composition_power_sum([2.0, 3.0], 2) == pytest.approx(19.0, rel=1e-14)


def test_power_sum_rejects_repeated_entries():
    with pytest.raises(DistinctnessViolated):
        composition_power_sum([1, 2, 1], 3)
    with pytest.raises(DistinctnessViolated):
        composition_power_sum([0.1, 0.1 + 1e-12], 2)


@pytest.mark.parametrize("k", range(0, 5))
def test_power_sum_matches_enumeration(k):
    rng = random.Random(1000 + k)
    for m in range(0, 9):
        c = rng.sample(range(-9, 10), k + 1)
        expected = brute_power_sum(c, m)
        assert composition_power_sum(c, m) == expected
        assert composition_power_sum(c, m, RATIONAL) == expected
        cf = [x + rng.random() * 0.3 for x in c]
        assert composition_power_sum(cf, m, FLOAT) == pytest.approx(
            brute_power_sum(cf, m), rel=1e-8, abs=1e-9)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=20),
       st.fractions(min_value=-50, max_value=50, max_denominator=20),
       st.fractions(min_value=-50, max_value=50, max_denominator=20))
def test_rational_round_trip(a, b, c):
    assert (a + b) - b == a
    if b:
        assert (a * b) / b == a
    assert (a + c).denominator > 0
