"""Closed-form moments of the log return log(p(t)/p(0)).

The finite-investor moment of order ``n`` is a polynomial in the log factors
``L_h = log f_h``::

    sum over compositions (n_1..n_g) of n of
        n!/prod(n_h!) * prod(L_h^n_h)
        * sum over k_h <= n_h of prod(N_h(0)^(k_h falling) * S(n_h, k_h))
        * sum_j (-1)^j C(K, j) (1 - j/N)^t,          K = sum k_h

:func:`moment_polynomial` returns the coefficient of each monomial, which is
what the exact comparison against the enumeration oracle works on. The
infinite-investor limit replaces ``N_h(0)`` by fractions ``q_h`` and the
alternating sum by the falling factorial ``t (t-1) ... (t-K+1)``.

Every evaluator takes a ``backend`` (``"float"`` or ``"rational"``). The
rational backend computes coefficients exactly; log factors are irrational, so
the final value is the exact sum of the (exactly converted) float logs times
the rational coefficients, rounded once.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, NamedTuple, Sequence

from .errors import DomainError, InvalidParams
from .model import ModelParams
from .numerics import (Backend, binomial, bounded_vectors, compositions,
                       falling_factorial, get_backend,
                       multinomial, stirling_table)

_EPS = sys.float_info.epsilon


class TraceTerm(NamedTuple):
    """One innermost term of the finite-N formula (trace mode)."""

    composition: tuple
    k: tuple
    j: int
    value: object


@dataclass(frozen=True)
class MomentRequest:
    params: ModelParams
    horizon: float
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


@dataclass(frozen=True)
class LimitParams:
    """Infinite-investor model: group ``h`` holds a fraction ``q_h`` of everyone."""

    fractions: tuple
    factors: tuple
    horizon: int
    order: int

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(self.fractions))
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.fractions) != len(self.factors):
            raise InvalidParams("fractions and factors differ in length")
        if any(q < 0 for q in self.fractions) or sum(self.fractions) > 1 + 1e-12:
            raise InvalidParams("fractions must be non-negative and sum to at most 1")
        if any(f <= 0 for f in self.factors):
            raise InvalidParams("factors must be positive")
        for a, b in zip(self.factors, self.factors[1:]):
            if not a < b:
                raise InvalidParams("factors must be strictly increasing")
        if int(self.horizon) != self.horizon or self.horizon < 0:
            raise DomainError("limit horizon must be a non-negative integer")
        object.__setattr__(self, "horizon", int(self.horizon))
        if self.order < 1:
            raise ValueError("order must be >= 1")


# ---------------------------------------------------------------------------
# alternating sum  sum_j (-1)^j C(k, j) (1 - j/N)^t


def _integral_horizon(t) -> int:
    if isinstance(t, int):
        return t
    if isinstance(t, Fraction) and t.denominator == 1:
        return int(t)
    if isinstance(t, float) and t.is_integer():
        return int(t)
    raise DomainError(f"the rational backend needs an integer horizon, got {t!r}")


def _fd_rational(k: int, n: int, t: int) -> Fraction:
    total = Fraction(0)
    for j in range(k + 1):
        term = binomial(k, j) * Fraction(n - j, n) ** t
        total += -term if j % 2 else term
    return total


def _fd_differencing(k: int, n: int, t: float) -> tuple:
    """Iterated differences of a_j = (1 - j/N)^t; returns (value, error bound)."""
    a = [math.pow((n - j) / n, t) for j in range(k + 1)]
    scale = max(abs(x) for x in a)
    for _ in range(k):
        a = [a[i] - a[i + 1] for i in range(len(a) - 1)]
    return a[0], (k + 1) * 2.0 ** k * _EPS * scale


_SERIES_TERMS = 160


@lru_cache(maxsize=64)
def _expm1_power_coeffs(k: int) -> tuple:
    """Float Taylor coefficients of (e^x - 1)^k up to degree k + _SERIES_TERMS."""
    deg = k + _SERIES_TERMS
    base = [1.0] * (deg + 1)
    for i in range(1, deg + 1):
        base[i] = base[i - 1] / i
    base[0] = 0.0
    out = [1.0] + [0.0] * deg
    for _ in range(k):
        nxt = [0.0] * (deg + 1)
        for i, oi in enumerate(out):
            if oi == 0.0:
                continue
            for m in range(1, deg + 1 - i):
                nxt[i + m] += oi * base[m]
        out = nxt
    return tuple(out)


def _fd_series(k: int, n: int, t: float) -> tuple:
    """Expansion in powers of 1/N: sum_{i>=k} (-1)^(i+k) (t)_i N^-i [x^i](e^x - 1)^k.

    Follows from expanding (1 - j/N)^t binomially and
    sum_j (-1)^j C(k,j) j^i = (-1)^k k! S(i,k) = (-1)^k i! [x^i](e^x - 1)^k.
    Returns (value, error bound); the bound is infinite when the series did
    not settle.
    """
    coeffs = _expm1_power_coeffs(k)
    h = 1.0 / n
    ff = 1.0  # (t)_i, real falling factorial
    hp = 1.0  # h^i
    for i in range(k):
        ff *= t - i
        hp *= h
    total = 0.0
    abs_total = 0.0
    small = 0
    for i in range(k, k + _SERIES_TERMS + 1):
        term = ff * hp * coeffs[i]
        if (i + k) % 2:
            term = -term
        total += term
        abs_total += abs(term)
        if ff == 0.0:
            return total, 4 * _EPS * abs_total
        if abs(term) <= 1e-18 * abs(total):
            small += 1
            if small >= 2:
                return total, 4 * _EPS * abs_total + abs(term)
        else:
            small = 0
        ff *= t - i
        hp *= h
    return total, math.inf


def finite_difference_term(k: int, N: int, t, backend="float"):
    """sum_{j=0}^{k} (-1)^j C(k, j) (1 - j/N)^t.

    Rational backend: exact, ``t`` must be an integer. Float backend: the
    better of iterated pairwise differencing and an expansion in powers of
    1/N, chosen by a running error bound. Differencing alone loses every
    significant digit once k/N is tiny, since the result is then of order
    (t k / N)^k.
    """
    be = get_backend(backend)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > N:
        raise DomainError(f"k={k} exceeds N={N}")
    if t < 0:
        raise DomainError("horizon must be non-negative")
    if be.exact:
        return _fd_rational(k, N, _integral_horizon(t))
    t = float(t)
    if k == 0:
        return 1.0
    value, err = _fd_differencing(k, N, t)
    if k / N <= 0.5:
        s_value, s_err = _fd_series(k, N, t)
        if s_err < err:
            return s_value
    return value


# ---------------------------------------------------------------------------
# finite-N formula


def _check_counts(counts: Sequence[int], total: int) -> None:
    if total < 1:
        raise InvalidParams("N must be a positive integer")
    if any(c < 0 for c in counts):
        raise InvalidParams("group counts must be non-negative")
    if sum(counts) > total:
        raise InvalidParams("group counts exceed N")


def _finite_coefficients(counts, total, t, n, be: Backend,
                         trace: Callable | None = None) -> dict:
    g = len(counts)
    table = stirling_table(n)
    fd_cache: dict = {}

    def fd(kk):
        if kk not in fd_cache:
            fd_cache[kk] = finite_difference_term(kk, total, t, be)
        return fd_cache[kk]

    coeffs = {}
    for comp in compositions(n, g):
        inner = be.coerce(0)
        for kvec in bounded_vectors(comp):
            weight = 1
            for c, nh, kh in zip(counts, comp, kvec):
                weight *= falling_factorial(c, kh) * table[nh, kh]
                if weight == 0:
                    break
            if weight == 0:
                continue
            kk = sum(kvec)
            if kk > total:
                # unreachable: a non-zero weight needs k_h <= N_h(0)
                raise DomainError(f"k={kk} exceeds N={total}")
            inner += be.coerce(weight) * fd(kk)
            if trace is not None:
                _trace_terms(trace, comp, kvec, weight * multinomial(comp), total, t, be)
        if inner != 0:
            coeffs[comp] = be.coerce(multinomial(comp)) * inner
    return coeffs


def _trace_terms(trace, comp, kvec, weight, total, t, be):
    kk = sum(kvec)
    for j in range(kk + 1):
        if be.exact:
            base = Fraction(total - j, total) ** _integral_horizon(t)
        else:
            base = math.pow((total - j) / total, float(t))
        term = be.coerce((-1) ** j * binomial(kk, j) * weight) * base
        trace(TraceTerm(comp, kvec, j, term))


def evaluate_polynomial(coeffs: Mapping, log_factors: Sequence[float], backend="float") -> float:
    """Evaluate sum_c coeff[c] * prod(L_h ** c_h) at the given log factors."""
    be = get_backend(backend)
    if be.exact:
        logs = [Fraction(float(x)) for x in log_factors]
        total = Fraction(0)
        for comp, coef in coeffs.items():
            mono = Fraction(coef)
            for lh, nh in zip(logs, comp):
                if nh:
                    mono *= lh ** nh
            total += mono
        return float(total)
    terms = []
    for comp, coef in coeffs.items():
        mono = float(coef)
        for lh, nh in zip(log_factors, comp):
            if nh:
                mono *= float(lh) ** nh
        terms.append(mono)
    return math.fsum(terms)


def moment_polynomial(params: ModelParams, t, n: int, backend="rational") -> dict:
    """Coefficients of the order-``n`` moment as a polynomial in the log factors.

    Keys are exponent tuples ``(n_1, ..., n_g)``; zero coefficients are
    dropped. Under the rational backend the values are exact Fractions.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    be = get_backend(backend)
    return _finite_coefficients(params.counts, params.total_investors, t, n, be)


def moment_multigroup(params: ModelParams, t, n: int, backend="float",
                      trace: Callable | None = None) -> float:
    """E[(log p(t)/p(0))^n] for a model with any number of groups.

    ``trace``, if given, is called with a :class:`TraceTerm` for every
    (composition, k-vector, j) term of the explicit alternating sum.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    if t < 0:
        raise DomainError("horizon must be non-negative")
    be = get_backend(backend)
    coeffs = _finite_coefficients(params.counts, params.total_investors, t, n, be, trace)
    return evaluate_polynomial(coeffs, params.log_factors, be)


def moment_two_group(N_u0: int, N_d0: int, N: int, u, d, t, n: int,
                     backend="float") -> float:
    """n-th moment of the log return in the bull/bear market.

    ``N_u0`` bulls push the price up by ``u > 1``, ``N_d0`` bears push it
    down by ``0 < d < 1``; the remaining ``N - N_u0 - N_d0`` investors are
    inactive from the start.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    if not u > 1 or not 0 < d < 1:
        raise InvalidParams("need 0 < d < 1 < u")
    _check_counts((N_u0, N_d0), N)
    if t < 0:
        raise DomainError("horizon must be non-negative")
    be = get_backend(backend)
    table = stirling_table(n)
    lu, ld = math.log(u), math.log(d)
    if be.exact:
        lu, ld = Fraction(lu), Fraction(ld)
    fd_cache = {}
    total = be.coerce(0)
    for n_d in range(n + 1):
        n_u = n - n_d
        inner = be.coerce(0)
        for k_u in range(n_u + 1):
            wu = falling_factorial(N_u0, k_u) * table[n_u, k_u]
            if wu == 0:
                continue
            for k_d in range(n_d + 1):
                wd = falling_factorial(N_d0, k_d) * table[n_d, k_d]
                if wd == 0:
                    continue
                kk = k_u + k_d
                if kk not in fd_cache:
                    fd_cache[kk] = finite_difference_term(kk, N, t, be)
                inner += be.coerce(wu * wd) * fd_cache[kk]
        total += be.coerce(multinomial((n_u, n_d))) * lu ** n_u * ld ** n_d * inner
    return float(total)


# ---------------------------------------------------------------------------
# infinite-investor limit


def limit_polynomial(fractions: Sequence, horizon: int, n: int, backend="rational") -> dict:
    be = get_backend(backend)
    qs = [be.coerce(q) for q in fractions]
    g = len(qs)
    table = stirling_table(n)
    coeffs = {}
    for comp in compositions(n, g):
        inner = be.coerce(0)
        for kvec in bounded_vectors(comp):
            w = be.coerce(falling_factorial(horizon, sum(kvec)))
            if w == 0:
                continue
            for q, nh, kh in zip(qs, comp, kvec):
                w *= q ** kh * table[nh, kh]
            inner += w
        if inner != 0:
            coeffs[comp] = be.coerce(multinomial(comp)) * inner
    return coeffs


def moment_limit(limit: LimitParams, backend="float") -> float:
    """Moment of the log return when N -> infinity with N_h(0) = q_h N."""
    be = get_backend(backend)
    coeffs = limit_polynomial(limit.fractions, limit.horizon, limit.order, be)
    return evaluate_polynomial(coeffs, [math.log(f) for f in limit.factors], be)


def moment_binomial(q_u, u, d, t: int, n: int, backend="float") -> float:
    """Moments of the classical binomial model (up with probability q_u)."""
    if not 0 <= q_u <= 1:
        raise InvalidParams("q_u must lie in [0, 1]")
    if not u > 1 or not 0 < d < 1:
        raise InvalidParams("need 0 < d < 1 < u")
    be = get_backend(backend)
    q_u = be.coerce(q_u)
    return moment_limit(LimitParams((1 - q_u, q_u), (d, u), t, n), be)

