"""Market model: investor groups, market state and path probabilities.

A market holds ``N`` investors. Group ``h`` starts with ``N_h(0)`` members
and moves the price by the factor ``f_h`` when one of its members trades;
everyone else is inactive. At each step one investor is chosen uniformly at
random and becomes inactive afterwards.

Outcomes are group indices ``0 .. g-1`` or :data:`INACTIVE`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DepletedGroup, InvalidParams, InvalidState

INACTIVE = "I"


@dataclass(frozen=True)
class GroupSpec:
    factor: float | Fraction
    initial_count: int

    def __post_init__(self):
        if not self.factor > 0:
            raise InvalidParams(f"group factor must be positive, got {self.factor!r}")
        if int(self.initial_count) != self.initial_count or self.initial_count < 0:
            raise InvalidParams(
                f"initial_count must be a non-negative integer, got {self.initial_count!r}")
        object.__setattr__(self, "initial_count", int(self.initial_count))

    @property
    def log_factor(self) -> float:
        return math.log(self.factor)


@dataclass(frozen=True)
class ModelParams:
    """Groups ordered by strictly increasing factor, plus the total ``N``."""

    groups: tuple
    total_investors: int

    def __post_init__(self):
        groups = tuple(
            g if isinstance(g, GroupSpec) else GroupSpec(*g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        n = self.total_investors
        if int(n) != n or n < 1:
            raise InvalidParams(f"total_investors must be a positive integer, got {n!r}")
        object.__setattr__(self, "total_investors", int(n))
        for a, b in zip(groups, groups[1:]):
            if not a.factor < b.factor:
                raise InvalidParams("group factors must be strictly increasing")
        if sum(g.initial_count for g in groups) > self.total_investors:
            raise InvalidParams("group counts exceed total_investors")

    @classmethod
    def two_group(cls, n_up: int, n_down: int, total: int, up, down) -> "ModelParams":
        """Bull/bear market: bulls move the price by ``up``, bears by ``down``."""
        return cls((GroupSpec(down, n_down), GroupSpec(up, n_up)), total)

    @classmethod
    def from_lists(cls, factors: Sequence, counts: Sequence[int], total: int) -> "ModelParams":
        if len(factors) != len(counts):
            raise InvalidParams("factors and counts differ in length")
        return cls(tuple(GroupSpec(f, c) for f, c in zip(factors, counts)), total)

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def factors(self) -> tuple:
        return tuple(g.factor for g in self.groups)

    @property
    def counts(self) -> tuple:
        return tuple(g.initial_count for g in self.groups)

    @property
    def log_factors(self) -> tuple:
        return tuple(g.log_factor for g in self.groups)

    @property
    def num_inactive(self) -> int:
        return self.total_investors - sum(self.counts)

    def outcomes(self) -> tuple:
        return tuple(range(self.num_groups)) + (INACTIVE,)

    def initial_state(self) -> "MarketState":
        return MarketState((0,) * self.num_groups)

    # JSON schema: {"groups": [{"factor": x, "count": n}, ...], "total_investors": N}
    def to_dict(self) -> dict:
        def enc(f):
            return f"{f.numerator}/{f.denominator}" if isinstance(f, Fraction) else float(f)

        return {
            "groups": [{"factor": enc(g.factor), "count": g.initial_count}
                       for g in self.groups],
            "total_investors": self.total_investors,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        try:
            groups = tuple(
                GroupSpec(_parse_factor(g["factor"]), g["count"]) for g in data["groups"])
            total = data["total_investors"]
        except (KeyError, TypeError) as exc:
            raise InvalidParams(f"malformed params document: {exc}") from None
        return cls(groups, total)


def _parse_factor(value):
    # rationals may be written as "3/4" to keep the exact backend exact
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParams(f"factor must be a number or 'p/q' string, got {value!r}")
    return value


@dataclass(frozen=True)
class MarketState:
    """Consumed members per group, accumulated log return and elapsed steps."""

    consumed: tuple
    log_price: float = 0.0
    time: int = 0

    def check(self, params: ModelParams) -> None:
        if len(self.consumed) != params.num_groups:
            raise InvalidState("state has the wrong number of groups")
        for c, g in zip(self.consumed, params.groups):
            if c < 0 or c > g.initial_count:
                raise InvalidState(f"consumed count {c} outside [0, {g.initial_count}]")
        if self.time < sum(self.consumed):
            raise InvalidState("time is smaller than the number of consumed investors")

    def remaining(self, params: ModelParams) -> tuple:
        return tuple(g.initial_count - c for g, c in zip(params.groups, self.consumed))


def transition_probs(params: ModelParams, state: MarketState) -> tuple:
    """Probability of each outcome from ``state``: groups first, inactive last."""
    state.check(params)
    n = params.total_investors
    probs = [Fraction(r, n) for r in state.remaining(params)]
    probs.append(Fraction(params.num_inactive + sum(state.consumed), n))
    return tuple(probs)


def _outcome_index(params: ModelParams, outcome) -> int | None:
    if outcome == INACTIVE:
        return None
    if isinstance(outcome, bool) or not isinstance(outcome, int) \
            or not 0 <= outcome < params.num_groups:
        raise ValueError(f"unknown outcome {outcome!r}")
    return outcome


def step(params: ModelParams, state: MarketState, outcome) -> MarketState:
    h = _outcome_index(params, outcome)
    if h is None:
        return MarketState(state.consumed, state.log_price, state.time + 1)
    if state.consumed[h] >= params.groups[h].initial_count:
        raise DepletedGroup(f"group {h} has no remaining members")
    consumed = list(state.consumed)
    consumed[h] += 1
    return MarketState(tuple(consumed),
                       state.log_price + params.groups[h].log_factor,
                       state.time + 1)


def path_probability(params: ModelParams, path: Iterable) -> Fraction:
    """Exact probability of observing ``path`` from the initial state.

    Paths through a depleted group have probability zero.
    """
    n = params.total_investors
    counts = params.counts
    consumed = [0] * params.num_groups
    inactive = params.num_inactive
    prob = Fraction(1)
    for outcome in path:
        h = _outcome_index(params, outcome)
        if h is None:
            prob *= Fraction(inactive + sum(consumed), n)
        else:
            remaining = counts[h] - consumed[h]
            if remaining <= 0:
                return Fraction(0)
            prob *= Fraction(remaining, n)
            consumed[h] += 1
        if prob == 0:
            return prob
    return prob


def path_log_return(params: ModelParams, path: Iterable) -> float:
    """Sum of log factors along the path (log p(t) - log p(0))."""
    logs = params.log_factors
    total = 0.0
    for outcome in path:
        h = _outcome_index(params, outcome)
        if h is not None:
            total += logs[h]
    return total
