"""Brute-force reference values.

Nothing here uses the closed-form moment formulas; these routines are the
ground truth those formulas are tested against.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import BudgetExceeded, InvalidParams
from .model import INACTIVE, ModelParams
from .numerics import compositions, multinomial, stirling2

BUDGET_ENV = "FINITEBINOM_ENUM_BUDGET"
DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def _check_budget(params: ModelParams, t: int, budget: int | None) -> None:
    budget = default_budget() if budget is None else budget
    if (params.num_groups + 1) ** t > budget:
        raise BudgetExceeded(
            f"{params.num_groups + 1}^{t} paths exceed the enumeration budget {budget}")


def iter_paths(params: ModelParams, t: int, budget: int | None = None) -> Iterator[tuple]:
    """Depth-first walk over every positive-probability path of length ``t``.

    Yields ``(path, probability)``. Branches into a depleted group are pruned.
    """
    _check_budget(params, t, budget)
    n = params.total_investors
    counts = params.counts
    base_inactive = params.num_inactive
    g = params.num_groups

    def walk(prefix, consumed, prob):
        if len(prefix) == t:
            yield tuple(prefix), prob
            return
        for h in range(g):
            left = counts[h] - consumed[h]
            if left:
                consumed[h] += 1
                prefix.append(h)
                yield from walk(prefix, consumed, prob * Fraction(left, n))
                prefix.pop()
                consumed[h] -= 1
        idle = base_inactive + sum(consumed)
        if idle:
            prefix.append(INACTIVE)
            yield from walk(prefix, consumed, prob * Fraction(idle, n))
            prefix.pop()

    yield from walk([], [0] * g, Fraction(1))


def count_distribution(params: ModelParams, t: int, budget: int | None = None) -> dict:
    """Exact law of the per-group choice counts after ``t`` steps.

    Same path sum as :func:`iter_paths`, with path suffixes that start from an
    identical state summed once.
    """
    _check_budget(params, t, budget)
    n = params.total_investors
    counts = params.counts
    base_inactive = params.num_inactive
    g = params.num_groups
    memo: dict = {}

    def suffix(consumed: tuple, steps: int) -> dict:
        if steps == 0:
            return {consumed: Fraction(1)}
        key = (consumed, steps)
        if key in memo:
            return memo[key]
        out: dict = {}
        branches = []
        for h in range(g):
            left = counts[h] - consumed[h]
            if left:
                nxt = consumed[:h] + (consumed[h] + 1,) + consumed[h + 1:]
                branches.append((Fraction(left, n), nxt))
        idle = base_inactive + sum(consumed)
        if idle:
            branches.append((Fraction(idle, n), consumed))
        for p, nxt in branches:
            for final, q in suffix(nxt, steps - 1).items():
                out[final] = out.get(final, 0) + p * q
        memo[key] = out
        return out

    return suffix((0,) * g, t)


def enumerate_polynomial(params: ModelParams, t: int, n: int,
                         budget: int | None = None) -> dict:
    """E[(sum_h c_h L_h)^n] expanded in the symbols L_h = log f_h.

    Returns exact Fraction coefficients keyed by exponent tuples, zero
    coefficients dropped.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    law = count_distribution(params, int(t), budget)
    coeffs = {}
    for comp in compositions(n, params.num_groups):
        acc = Fraction(0)
        for c, p in law.items():
            mono = 1
            for ch, nh in zip(c, comp):
                mono *= ch ** nh
            acc += p * mono
        if acc:
            coeffs[comp] = multinomial(comp) * acc
    return coeffs


def enumerate_moment(params: ModelParams, t: int, n: int,
                     budget: int | None = None) -> float:
    """n-th moment of the log return by exhaustive enumeration.

    The expectation is accumulated exactly in the log-factor symbols and
    converted to float once at the end.
    """
    coeffs = enumerate_polynomial(params, t, n, budget)
    logs = [Fraction(x) for x in params.log_factors]
    total = Fraction(0)
    for comp, coef in coeffs.items():
        mono = Fraction(coef)
        for lh, nh in zip(logs, comp):
            mono *= lh ** nh
        total += mono
    return float(total)


def total_mass(params: ModelParams, t: int, budget: int | None = None) -> Fraction:
    return sum((p for _, p in iter_paths(params, t, budget)), Fraction(0))


def binomial_direct(q_u, u, d, t: int, n: int) -> float:
    """sum_x C(t,x) q^x (1-q)^(t-x) (x log u + (t-x) log d)^n."""
    if not 0 <= q_u <= 1:
        raise InvalidParams("q_u must lie in [0, 1]")
    lu, ld = math.log(u), math.log(d)
    q_u = float(q_u)
    terms = []
    for x in range(t + 1):
        w = math.comb(t, x) * q_u ** x * (1.0 - q_u) ** (t - x)
        if w:
            terms.append(w * (x * lu + (t - x) * ld) ** n)
    return math.fsum(terms)


def compound_poisson_moment(weights: Sequence, rates: Sequence, n: int):
    """E[(sum_h r_h X_h)^n] with independent X_h ~ Poisson(weights[h]).

    Uses the multinomial expansion and E[X^m] = sum_k S(m,k) lam^k. With
    int/Fraction inputs the result is an exact Fraction, otherwise a float.
    """
    if len(weights) != len(rates):
        raise ValueError("weights and rates differ in length")
    if any(w <= 0 for w in weights):
        raise InvalidParams("Poisson weights must be positive")
    exact = all(isinstance(v, (int, Fraction)) for v in (*weights, *rates))
    terms = []
    for comp in compositions(n, len(weights)):
        term = Fraction(multinomial(comp)) if exact else float(multinomial(comp))
        for lam, r, m in zip(weights, rates, comp):
            raw = sum(stirling2(m, k) * lam ** k for k in range(m + 1))
            term *= raw * r ** m
        terms.append(term)
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)
