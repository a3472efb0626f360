"""Fit model parameters to the first 2g raw moments of the log return.

Pipeline::

    raw moments -> cumulants -> Hankel pencil (H0, H1) -> roots r_h
                -> Poisson weights lambda_h -> group counts, factors, horizon

The roots are the log factors of the fitted groups. The weights make
``sum_h r_h X_h`` with ``X_h ~ Poisson(lambda_h)`` reproduce the given
moments exactly, and the finite-investor model converges to that compound
Poisson law as the anchor group grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (AnchorTooSmall, ComplexRoots, DistinctnessViolated,
                     InvalidFit, SingularHankel, TotalTooSmall, ZeroRoot)
from .model import GroupSpec, ModelParams

#: |Im z| <= IMAG_TOL * (1 + |z|) counts as real
IMAG_TOL = 1e-9
#: roots closer than this (relative) are not distinct
DISTINCT_RTOL = 1e-9
#: a root below this fraction of the root scale counts as zero
ZERO_RTOL = 1e-9
#: default rejection bound for the (balanced) condition number of H0
COND_BOUND = 1e12


@dataclass(frozen=True)
class CumulantVector:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 2 or len(self.values) % 2:
            raise ValueError("a cumulant vector needs an even length >= 2")

    @property
    def order(self) -> int:
        return len(self.values)

    @property
    def num_groups(self) -> int:
        return len(self.values) // 2

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)


def cumulants_from_moments(m: Sequence[float]) -> CumulantVector:
    """kappa_n = n! [x^n] log(1 + sum_k m_k x^k / k!), n = 1..len(m).

    The power-series logarithm runs in exact rational arithmetic on the
    (exactly converted) inputs; only the final values are rounded.
    """
    if len(m) < 2 or len(m) % 2:
        raise ValueError("need an even number (>= 2) of moments")
    a = [Fraction(0)] + [Fraction(v) / math.factorial(k) for k, v in enumerate(m, 1)]
    b = [Fraction(0)] * len(a)
    for n in range(1, len(a)):
        acc = sum((k * b[k] * a[n - k] for k in range(1, n)), Fraction(0))
        b[n] = a[n] - acc / n
    return CumulantVector(tuple(float(math.factorial(n) * b[n]) for n in range(1, len(a))))


def hankel_pencil(kappa: CumulantVector | Sequence[float]) -> tuple:
    """H0[i, j] = kappa_{i+j+1}, H1[i, j] = kappa_{i+j+2} (1-based kappa)."""
    k = np.asarray(kappa.values if isinstance(kappa, CumulantVector) else kappa, dtype=float)
    if len(k) < 2 or len(k) % 2:
        raise ValueError("a cumulant vector needs an even length >= 2")
    g = len(k) // 2
    idx = np.add.outer(np.arange(g), np.arange(g))
    return k[idx], k[idx + 1]


def _root_scale(H0, H1) -> float:
    # kappa_1..kappa_2g sit on the first row and last column of the pencil
    kap = np.concatenate([H0[0], H1[:, -1]])
    scale = max((abs(v) ** (1.0 / n) for n, v in enumerate(kap, 1) if v != 0), default=1.0)
    return scale if scale > 0 and math.isfinite(scale) else 1.0


def _balance(H0, H1, scale: float):
    d = scale ** -np.arange(H0.shape[0], dtype=float)
    D = np.outer(d, d)
    return H0 * D / scale, H1 * D / scale**2


def hankel_condition(H0, H1=None) -> float:
    """2-norm condition number of H0 after diagonal balancing.

    Balancing rescales the log return by the root scale; it changes the roots
    by that factor only and keeps the estimate from reflecting mere units.
    """
    H0 = np.asarray(H0, dtype=float)
    H1 = H0 if H1 is None else np.asarray(H1, dtype=float)
    B0, _ = _balance(H0, H1, _root_scale(H0, H1))
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(B0)
    return float(cond) if np.isfinite(cond) else math.inf


def _check_real(z: np.ndarray) -> np.ndarray:
    bad = np.abs(z.imag) > IMAG_TOL * (1 + np.abs(z))
    if bad.any():
        raise ComplexRoots(f"pencil has non-real roots {z[bad]}")
    return np.sort(z.real)


def pencil_roots(H0, H1, cond_bound: float = COND_BOUND) -> np.ndarray:
    """Real roots of det(H0 x - H1), ascending.

    These are the eigenvalues of H0^-1 H1; closed forms are used for g <= 2.
    Raises :class:`SingularHankel` when H0 is too ill-conditioned and
    :class:`ComplexRoots` when a root is not real.
    """
    H0 = np.atleast_2d(np.asarray(H0, dtype=float))
    H1 = np.atleast_2d(np.asarray(H1, dtype=float))
    g = H0.shape[0]
    scale = _root_scale(H0, H1)
    B0, B1 = _balance(H0, H1, scale)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(B0)
    if not np.isfinite(cond) or cond > cond_bound:
        raise SingularHankel(f"H0 condition estimate {cond:.3g} exceeds {cond_bound:.3g}")
    if g == 1:
        return np.array([B1[0, 0] / B0[0, 0] * scale])
    if g == 2:
        a = B0[0, 0] * B0[1, 1] - B0[0, 1] * B0[1, 0]
        b = -(B0[0, 0] * B1[1, 1] + B0[1, 1] * B1[0, 0]
              - B0[0, 1] * B1[1, 0] - B0[1, 0] * B1[0, 1])
        c = B1[0, 0] * B1[1, 1] - B1[0, 1] * B1[1, 0]
        disc = b * b - 4 * a * c
        if disc < 0:
            re = -b / (2 * a)
            im = math.sqrt(-disc) / (2 * abs(a))
            z = np.array([re - 1j * im, re + 1j * im])
        else:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b))
            z = np.array([q / a, c / q if q != 0 else 0.0], dtype=complex)
        return _check_real(z) * scale
    z = np.linalg.eigvals(np.linalg.solve(B0, B1))
    return _check_real(z.astype(complex)) * scale


def _check_roots(roots: np.ndarray) -> None:
    scale = float(np.max(np.abs(roots))) if len(roots) else 0.0
    for i, r in enumerate(roots):
        if abs(r) <= ZERO_RTOL * scale or r == 0:
            raise ZeroRoot(f"root {i} is zero")
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= DISTINCT_RTOL * max(abs(roots[i]), abs(roots[j])):
                raise DistinctnessViolated(f"roots {i} and {j} coincide")


def solve_weights(roots: Sequence[float], kappa: CumulantVector | Sequence[float]) -> tuple:
    """Solve sum_h lambda_h r_h^n = kappa_n for n = 1..g.

    That is V^T D lambda = (kappa_1..kappa_g), with V the Vandermonde matrix
    of the roots and D = diag(roots). Returns ``(weights, residual)`` where
    the residual is the 2-norm of V^T D lambda - kappa_{1..g}. The weights
    follow the order of ``roots``.
    """
    r = np.asarray(roots, dtype=float)
    k = np.asarray(kappa.values if isinstance(kappa, CumulantVector) else kappa, dtype=float)
    g = len(r)
    _check_roots(r)
    scale = float(np.max(np.abs(r)))
    powers = np.arange(1, g + 1)
    A = (r / scale)[None, :] ** powers[:, None]
    lam = np.linalg.solve(A, k[:g] / scale**powers)
    residual = float(np.linalg.norm(r[None, :] ** powers[:, None] @ lam - k[:g]))
    return lam, residual


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    margin: float

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "margin", float(self.margin))


@dataclass(frozen=True)
class ValidityReport:
    conditions: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def failed(self) -> tuple:
        return tuple(c.name for c in self.conditions if not c.passed)

    def __getitem__(self, name) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {c.name: {"passed": c.passed, "margin": c.margin} for c in self.conditions}


ROOTS_REAL_NONZERO = "roots_real_nonzero"
ROOTS_DISTINCT = "roots_distinct"
WEIGHTS_POSITIVE = "weights_positive"
ROOT_CONDITIONS = (ROOTS_REAL_NONZERO, ROOTS_DISTINCT)


def validate_fit(roots, weights=None) -> ValidityReport:
    """Check the three conditions under which the moments can be matched.

    Roots must be real and non-zero, pairwise distinct, and every weight
    positive. Margins: smallest |root| relative to the largest (minus
    tolerance, or -inf for a non-real root); smallest relative gap between
    roots minus tolerance; smallest weight. ``weights=None`` checks the
    roots only.
    """
    z = np.asarray(roots)
    if np.iscomplexobj(z):
        real = bool(np.all(np.abs(z.imag) <= IMAG_TOL * (1 + np.abs(z))))
        r = z.real.astype(float)
    else:
        real = True
        r = z.astype(float)
    scale = float(np.max(np.abs(r))) if len(r) else 0.0
    if scale > 0:
        nz_margin = float(np.min(np.abs(r))) / scale - ZERO_RTOL
    else:
        nz_margin = -ZERO_RTOL
    conds = [Condition(ROOTS_REAL_NONZERO, real and nz_margin > 0,
                       nz_margin if real else -math.inf)]
    gap = math.inf
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            denom = max(abs(r[i]), abs(r[j]))
            rel = abs(r[i] - r[j]) / denom if denom > 0 else 0.0
            gap = min(gap, rel)
    gap_margin = gap - DISTINCT_RTOL
    conds.append(Condition(ROOTS_DISTINCT, gap_margin > 0, gap_margin))
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        wmin = float(np.min(w)) if len(w) else math.inf
        conds.append(Condition(WEIGHTS_POSITIVE, wmin > 0, wmin))
    return ValidityReport(tuple(conds))


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def map_parameters(roots, weights, anchor_count: int, total: int | None = None) -> tuple:
    """Model parameters whose moments approach the compound Poisson ones.

    The last (largest-factor) group gets ``anchor_count`` members and group i
    gets round(lambda_i / lambda_g * anchor_count), at least 1. Factors are
    exp(r_h); the horizon is t = -N log(1 - lambda_g / anchor_count), real.
    Returns ``(ModelParams, t)``.

    ``total`` defaults to ``anchor_count`` times the number of group members.
    The approximation error is of order 1/t + lambda_g/anchor_count, and t
    is about sum(lambda) * N / sum(N_h(0)). With no inactive investors, t
    stays near sum(lambda) however large the anchor is, and moments of order
    2 and above stop improving.
    """
    r = np.asarray(roots, dtype=float)
    lam = np.asarray(weights, dtype=float)
    order = np.argsort(r, kind="stable")
    r, lam = r[order], lam[order]
    report = validate_fit(r, lam)
    if not report.ok:
        raise InvalidFit(f"fit fails {', '.join(report.failed)}", report)
    if anchor_count < 1 or int(anchor_count) != anchor_count:
        raise ValueError("anchor_count must be a positive integer")
    lam_g = float(lam[-1])
    if anchor_count <= lam_g:
        raise AnchorTooSmall(f"anchor_count {anchor_count} must exceed lambda_g = {lam_g}")
    counts = [max(1, _round_half_away(li / lam_g * anchor_count)) for li in lam[:-1]]
    counts.append(int(anchor_count))
    needed = sum(counts)
    if total is None:
        total = needed * int(anchor_count)
    elif total < needed:
        raise TotalTooSmall(f"total {total} is below the {needed} group members")
    params = ModelParams(tuple(GroupSpec(math.exp(x), c) for x, c in zip(r, counts)), int(total))
    horizon = -total * math.log1p(-lam_g / anchor_count)
    return params, horizon


@dataclass(frozen=True)
class FitResult:
    roots: tuple
    weights: tuple
    mapped_params: ModelParams
    mapped_horizon: float
    cumulants: CumulantVector
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "roots": list(self.roots),
            "weights": list(self.weights),
            "cumulants": list(self.cumulants.values),
            "mapped_params": self.mapped_params.to_dict(),
            "mapped_horizon": self.mapped_horizon,
            "diagnostics": self.diagnostics,
        }


def fit(m: Sequence[float], g: int, anchor_count: int, total: int | None = None,
        cond_bound: float = COND_BOUND) -> FitResult:
    """Run the whole pipeline on raw moments m_1..m_2g.

    Stops at the first failure: :class:`SingularHankel`,
    :class:`ComplexRoots`, :class:`InvalidFit` (root or weight conditions),
    :class:`AnchorTooSmall` or :class:`TotalTooSmall`.
    """
    if g < 1:
        raise ValueError("g must be >= 1")
    if len(m) != 2 * g:
        raise ValueError(f"need {2 * g} moments for g={g}, got {len(m)}")
    kappa = cumulants_from_moments(m)
    H0, H1 = hankel_pencil(kappa)
    roots = pencil_roots(H0, H1, cond_bound)
    root_report = validate_fit(roots)
    if not root_report.ok:
        raise InvalidFit(f"roots fail {', '.join(root_report.failed)}", root_report)
    weights, residual = solve_weights(roots, kappa)
    report = validate_fit(roots, weights)
    if not report.ok:
        raise InvalidFit(f"weights fail {', '.join(report.failed)}", report)
    params, horizon = map_parameters(roots, weights, anchor_count, total)
    diagnostics = {
        "hankel_condition": hankel_condition(H0, H1),
        "vandermonde_residual": residual,
        "validity": report.to_dict(),
    }
    return FitResult(tuple(float(x) for x in roots), tuple(float(x) for x in weights),
                     params, horizon, kappa, diagnostics)
