"""Fuzzy partitioning of continuous spaces and the rule-pair Q-table.

Continuous states and actions are covered by Gaussian fuzzy sets. Joint state
rules combine per-dimension memberships with the product t-norm in row-major
multi-index order (last dimension varies fastest). The Q-table is a dense
(rule_count x action_count) float64 array; one entry per (state rule, action
set) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMembership,
    DimensionMismatch,
    InvalidPartition,
    InvalidTemperature,
    NonFiniteInput,
)


@dataclass(frozen=True)
class DimensionPartition:
    """Gaussian fuzzy sets along one continuous dimension."""

    centers: np.ndarray
    sigma: float
    range_lo: float
    range_hi: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        object.__setattr__(self, "centers", centers)
        if centers.ndim != 1 or centers.size < 2:
            raise InvalidPartition("need at least 2 centers per dimension")
        if np.any(np.diff(centers) <= 0):
            raise InvalidPartition("centers must be strictly increasing")
        if not self.sigma > 0:
            raise InvalidPartition(f"sigma must be positive, got {self.sigma}")
        if not self.range_lo < self.range_hi:
            raise InvalidPartition(
                f"empty range [{self.range_lo}, {self.range_hi}]"
            )


@dataclass(frozen=True)
class StatePartition:
    """Per-dimension partitions plus the derived joint rule count."""

    dims: tuple[DimensionPartition, ...]
    rule_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise InvalidPartition("state partition needs at least one dimension")
        count = 1
        for d in self.dims:
            count *= d.centers.size
        object.__setattr__(self, "rule_count", count)


@dataclass(frozen=True)
class ActionPartition:
    """Gaussian fuzzy sets over the one-dimensional action range."""

    centers: np.ndarray
    sigma: float
    range_lo: float
    range_hi: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        object.__setattr__(self, "centers", centers)
        if centers.ndim != 1 or centers.size < 2:
            raise InvalidPartition("need at least 2 action centers")
        if np.any(np.diff(centers) <= 0):
            raise InvalidPartition("centers must be strictly increasing")
        if not self.sigma > 0:
            raise InvalidPartition(f"sigma must be positive, got {self.sigma}")
        if not self.range_lo < self.range_hi:
            raise InvalidPartition(
                f"empty range [{self.range_lo}, {self.range_hi}]"
            )

    @property
    def action_count(self) -> int:
        return self.centers.size


@dataclass(frozen=True)
class PolicyDistribution:
    """SoftMax distribution over state rules at one state."""

    probs: np.ndarray
    temperature: float


def _even_partition(lo: float, hi: float, count: int) -> DimensionPartition:
    if count < 2:
        raise InvalidPartition(f"count must be >= 2, got {count}")
    if not lo < hi:
        raise InvalidPartition(f"empty range [{lo}, {hi}]")
    spacing = (hi - lo) / (count - 1)
    centers = lo + spacing * np.arange(count, dtype=np.float64)
    return DimensionPartition(centers=centers, sigma=spacing / 2.0, range_lo=lo, range_hi=hi)


def build_state_partition(ranges, counts) -> StatePartition:
    """Evenly spaced centers over each range; sigma is half the center spacing."""
    if len(ranges) != len(counts):
        raise InvalidPartition("ranges and counts must have equal length")
    dims = tuple(_even_partition(lo, hi, n) for (lo, hi), n in zip(ranges, counts))
    return StatePartition(dims=dims)


def build_action_partition(lo: float, hi: float, count: int) -> ActionPartition:
    """Evenly spaced action centers; sigma is half the center spacing."""
    d = _even_partition(lo, hi, count)
    return ActionPartition(centers=d.centers, sigma=d.sigma, range_lo=lo, range_hi=hi)


def _check_finite_scalar(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteInput(f"non-finite input {x!r}")
    return x


def membership_1d(part: DimensionPartition, x: float) -> np.ndarray:
    """Gaussian membership of x in every fuzzy set of one dimension.

    x is clamped to the partition range before evaluation, so every entry
    lies in (0, 1] and the vector never vanishes.
    """
    x = _check_finite_scalar(x)
    x = min(max(x, part.range_lo), part.range_hi)
    d = x - part.centers
    return np.exp(-(d * d) / (2.0 * part.sigma * part.sigma))


def joint_state_membership(sp: StatePartition, s) -> np.ndarray:
    """Product t-norm over per-dimension memberships, row-major rule order."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (len(sp.dims),):
        raise DimensionMismatch(
            f"state has shape {s.shape}, partition has {len(sp.dims)} dimensions"
        )
    mu = membership_1d(sp.dims[0], s[0])
    for d in range(1, len(sp.dims)):
        mu = np.multiply.outer(mu, membership_1d(sp.dims[d], s[d]))
    return mu.ravel()


def normalize_weights(mu: np.ndarray) -> np.ndarray:
    """Normalize raw memberships into a convex weight vector summing to 1."""
    mu = np.asarray(mu, dtype=np.float64)
    total = mu.sum()
    if total <= 0.0:
        raise DegenerateMembership("membership mass underflowed to zero")
    return mu / total


def action_membership(ap: ActionPartition, a: float) -> np.ndarray:
    """Gaussian membership of action a in every action set (a clamped to range)."""
    a = _check_finite_scalar(a)
    a = min(max(a, ap.range_lo), ap.range_hi)
    d = a - ap.centers
    return np.exp(-(d * d) / (2.0 * ap.sigma * ap.sigma))


def new_q_table(rule_count: int, action_count: int) -> np.ndarray:
    """Zero-initialized rule-pair value table."""
    return np.zeros((rule_count, action_count), dtype=np.float64)


def fuzzy_value(q: np.ndarray, w: np.ndarray) -> float:
    """Weighted best-entry value: sum_i w_i * max_j q[i, j]."""
    return float(w @ q.max(axis=1))


def td_error_matrix(q: np.ndarray, r: float, upsilon_next: float, gamma: float) -> np.ndarray:
    """Full TD-error matrix r + gamma * upsilon_next - q[i, j]."""
    return (r + gamma * upsilon_next) - q


def greedy_indices(q: np.ndarray) -> np.ndarray:
    """Per-rule argmax column; ties resolve to the lowest index."""
    return np.argmax(q, axis=1)


def softmax(args: np.ndarray) -> np.ndarray:
    """Stable SoftMax: the largest argument is subtracted before exponentiation."""
    z = np.exp(args - args.max())
    return z / z.sum()


def policy_distribution(q: np.ndarray, w: np.ndarray, beta: float) -> PolicyDistribution:
    """SoftMax over per-rule scores w_i * max_j q[i, j] at temperature beta.

    Taken verbatim from the update rule family this table implements: the
    weight multiplies the row maximum inside the exponent, so for strongly
    negative tables the distribution shifts toward weakly activated rules.
    """
    if not beta > 0:
        raise InvalidTemperature(f"temperature must be positive, got {beta}")
    return PolicyDistribution(probs=softmax(w * q.max(axis=1) / beta), temperature=float(beta))


def defuzzify_action(p: PolicyDistribution, ap: ActionPartition, jstar: np.ndarray) -> float:
    """Crisp action: probability-weighted mean of each rule's greedy center.

    A convex combination of fixed centers, hence always inside
    [centers[0], centers[-1]].
    """
    return float(p.probs @ ap.centers[jstar])
