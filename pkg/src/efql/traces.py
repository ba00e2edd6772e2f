"""Fuzzified eligibility traces and the trace-weighted table update.

The activation matrix is the outer product of a state membership vector and
an action membership vector. Traces decay by gamma*lambda, accumulate the
current activation, and are clamped into [0, 1] entrywise.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteUpdate, ParameterOutOfRange, ShapeMismatch


def activation(mu_s: np.ndarray, mu_a: np.ndarray) -> np.ndarray:
    """Rule-pair activation: outer product of the two membership vectors."""
    mu_s = np.asarray(mu_s, dtype=np.float64)
    mu_a = np.asarray(mu_a, dtype=np.float64)
    if mu_s.ndim != 1 or mu_a.ndim != 1:
        raise ShapeMismatch("membership inputs must be 1-D vectors")
    return np.multiply.outer(mu_s, mu_a)


def new_traces(rule_count: int, action_count: int) -> np.ndarray:
    return np.zeros((rule_count, action_count), dtype=np.float64)


def update_traces(e: np.ndarray, zeta: np.ndarray, gamma: float, lam: float) -> np.ndarray:
    """In place: e <- min(gamma*lambda*e + zeta, 1)."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterOutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    if not 0.0 <= lam <= 1.0:
        raise ParameterOutOfRange(f"lambda must lie in [0, 1], got {lam}")
    if e.shape != zeta.shape:
        raise ShapeMismatch(f"traces {e.shape} vs activation {zeta.shape}")
    e *= gamma * lam
    e += zeta
    np.minimum(e, 1.0, out=e)
    return e


def reset_traces(e: np.ndarray) -> None:
    """Zero every trace entry (applied after exploratory actions)."""
    e.fill(0.0)


def apply_update(q: np.ndarray, alpha: float, e: np.ndarray, delta: np.ndarray) -> None:
    """In place: q[i, j] += alpha * e[i, j] * delta[i, j].

    Raises NonFiniteUpdate if any resulting entry is NaN/Inf, which aborts
    the run rather than letting a diverged table keep learning.
    """
    if not alpha > 0:
        raise ParameterOutOfRange(f"alpha must be positive, got {alpha}")
    if q.shape != e.shape or q.shape != delta.shape:
        raise ShapeMismatch(f"q {q.shape}, traces {e.shape}, delta {delta.shape}")
    q += alpha * e * delta
    # NaN and +/-Inf both poison the sum, so one reduction checks the table.
    if not np.isfinite(q.sum()):
        raise NonFiniteUpdate("table update produced non-finite entries")
