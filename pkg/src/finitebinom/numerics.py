"""Combinatorial primitives and scalar backends.

All integer-valued helpers return Python ``int`` (arbitrary precision).
Rational quantities are :class:`fractions.Fraction`, which is always kept in
lowest terms with a positive denominator.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DistinctnessViolated

ExactRational = Fraction

#: relative gap below which two floats are treated as equal
FLOAT_DISTINCT_RTOL = 1e-9


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k); zero when ``k > n``."""
    if n < 0 or k < 0:
        raise ValueError("binomial() arguments must be non-negative")
    return math.comb(n, k)


def falling_factorial(x: int, k: int) -> int:
    """x (x-1) ... (x-k+1), with the empty product equal to 1.

    The product form is used for every ``k``, so the result is 0 whenever
    ``k > x`` (one factor is zero).
    """
    if x < 0 or k < 0:
        raise ValueError("falling_factorial() arguments must be non-negative")
    return math.perm(x, k)


def falling_factorial_real(x, k: int):
    """Falling factorial for a non-integer (or rational) ``x``."""
    out = 1
    for i in range(k):
        out *= x - i
    return out


def multinomial(parts: Sequence[int]) -> int:
    """(sum parts)! / prod(part!)."""
    out, total = 1, 0
    for p in parts:
        if p < 0:
            raise ValueError("multinomial() parts must be non-negative")
        total += p
        out *= math.comb(total, p)
    return out


class Stirling2Table:
    """Triangular table of Stirling numbers of the second kind.

    ``table[n, k]`` gives S(n, k) for ``0 <= k <= n <= max_n``; entries with
    ``k > n`` read as 0. The table is immutable once built.
    """

    def __init__(self, max_n: int):
        if max_n < 0:
            raise ValueError("max_n must be non-negative")
        rows = [(1,)]
        for n in range(1, max_n + 1):
            prev = rows[-1]
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                left = prev[k] if k < n else 0
                row[k] = k * left + prev[k - 1]
            rows.append(tuple(row))
        self.max_n = max_n
        self.values = tuple(rows)

    def __getitem__(self, nk):
        n, k = nk
        if n < 0 or k < 0:
            raise ValueError("Stirling indices must be non-negative")
        if n > self.max_n:
            raise IndexError(f"order {n} exceeds table bound {self.max_n}")
        if k > n:
            return 0
        return self.values[n][k]

    def row(self, n: int) -> tuple:
        return self.values[n]


_table_lock = threading.Lock()
_table = Stirling2Table(16)


def stirling_table(max_n: int) -> Stirling2Table:
    """Shared table covering at least order ``max_n`` (grown on demand)."""
    global _table
    table = _table
    if table.max_n >= max_n:
        return table
    with _table_lock:
        if _table.max_n < max_n:
            _table = Stirling2Table(max(max_n, 2 * _table.max_n))
        return _table


def stirling2(n: int, k: int) -> int:
    """Number of partitions of an n-set into k non-empty blocks."""
    return stirling_table(n)[n, k]


def compositions(n: int, parts: int) -> Iterator[tuple]:
    """Weak compositions of ``n`` into ``parts`` non-negative parts.

    Yielded in colexicographic order: the last part varies slowest.
    """
    if parts == 0:
        if n == 0:
            yield ()
        return
    if parts == 1:
        yield (n,)
        return
    for last in range(n + 1):
        for head in compositions(n - last, parts - 1):
            yield head + (last,)


def bounded_vectors(bounds: Sequence[int]) -> Iterator[tuple]:
    """All integer vectors ``v`` with ``0 <= v[i] <= bounds[i]``, colex order."""
    if not bounds:
        yield ()
        return
    for last in range(bounds[-1] + 1):
        for head in bounded_vectors(bounds[:-1]):
            yield head + (last,)


# ---------------------------------------------------------------------------
# scalar backends


@dataclass(frozen=True)
class Backend:
    """Scalar arithmetic flavour used by the formula code.

    ``rational`` evaluates everything with :class:`~fractions.Fraction` and
    never rounds; ``float`` uses IEEE doubles.
    """

    name: str

    @property
    def exact(self) -> bool:
        return self.name == "rational"

    def coerce(self, x):
        if self.exact:
            if isinstance(x, float) and not math.isfinite(x):
                raise ValueError(f"cannot represent {x!r} exactly")
            return Fraction(x)
        return float(x)

    def distinct(self, a, b) -> bool:
        if self.exact:
            return a != b
        return abs(a - b) > FLOAT_DISTINCT_RTOL * max(abs(a), abs(b))

    def __repr__(self):
        return f"Backend({self.name!r})"


RATIONAL = Backend("rational")
FLOAT = Backend("float")


def get_backend(backend) -> Backend:
    if isinstance(backend, Backend):
        return backend
    if backend in ("rational", "exact", "fraction"):
        return RATIONAL
    if backend in ("float", "floating", "double"):
        return FLOAT
    raise ValueError(f"unknown backend {backend!r}")


def _infer_backend(values) -> Backend:
    if all(isinstance(v, (int, Fraction)) for v in values):
        return RATIONAL
    return FLOAT


def composition_power_sum(c: Sequence, m: int, backend=None):
    """Complete homogeneous symmetric polynomial h_m(c_0, ..., c_k).

    Evaluated through the closed form

        sum_j c_j^(m+k) / prod_{i != j} (c_j - c_i),

    which needs the entries of ``c`` to be pairwise distinct. With no
    explicit backend, ints and Fractions select exact arithmetic.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if len(c) == 0:
        raise ValueError("c must be non-empty")
    be = _infer_backend(c) if backend is None else get_backend(backend)
    vals = [be.coerce(x) for x in c]
    k = len(vals) - 1
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if not be.distinct(vals[i], vals[j]):
                raise DistinctnessViolated(
                    f"c[{i}]={vals[i]!r} and c[{j}]={vals[j]!r} coincide")
    total = be.coerce(0)
    for j, cj in enumerate(vals):
        denom = be.coerce(1)
        for i, ci in enumerate(vals):
            if i != j:
                denom *= cj - ci
        total += cj ** (m + k) / denom
    return total
