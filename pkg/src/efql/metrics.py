"""Learning-curve metrics: final-return average and convergence episode."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySeries

RETURN_THRESHOLD = -200.0
CONVERGENCE_WINDOW = 10


def compute_metrics(returns, threshold: float = RETURN_THRESHOLD,
                    window: int = CONVERGENCE_WINDOW) -> tuple[float, int | None]:
    """(average return over the last 10% of episodes, convergence episode).

    The convergence episode is the first 1-based episode index whose trailing
    `window`-episode moving-average return exceeds `threshold`; None if the
    moving average never crosses. Partial windows do not count.
    """
    returns = np.asarray(returns, dtype=np.float64)
    if returns.size == 0:
        raise EmptySeries("returns vector is empty")
    tail = math.ceil(0.1 * returns.size)
    avg_last = float(returns[-tail:].mean())
    convergence = None
    if returns.size >= window:
        means = np.convolve(returns, np.full(window, 1.0 / window), mode="valid")
        above = np.nonzero(means > threshold)[0]
        if above.size:
            convergence = int(above[0]) + window
    return avg_last, convergence


@dataclass(frozen=True)
class RunSummary:
    """One seeded run: per-episode series plus the three headline metrics.

    Wall-clock timing fields are excluded from equality so that two runs with
    the same config and seed compare equal.
    """

    agent: str
    seed: int
    per_episode_returns: np.ndarray
    per_episode_mean_abs_td: np.ndarray
    per_episode_update_ms: np.ndarray = field(compare=False)
    avg_return_last_10pct: float = 0.0
    mean_update_time_ms: float = field(default=0.0, compare=False)
    convergence_episode: int | None = None

    def __eq__(self, other):  # array fields need elementwise comparison
        if not isinstance(other, RunSummary):
            return NotImplemented
        return (self.agent == other.agent and self.seed == other.seed
                and np.array_equal(self.per_episode_returns, other.per_episode_returns)
                and np.array_equal(self.per_episode_mean_abs_td, other.per_episode_mean_abs_td)
                and self.avg_return_last_10pct == other.avg_return_last_10pct
                and self.convergence_episode == other.convergence_episode)


def summarize_run(agent: str, seed: int, returns, mean_abs_td, update_ms,
                  threshold: float = RETURN_THRESHOLD,
                  window: int = CONVERGENCE_WINDOW) -> RunSummary:
    returns = np.asarray(returns, dtype=np.float64)
    update_ms = np.asarray(update_ms, dtype=np.float64)
    avg_last, convergence = compute_metrics(returns, threshold, window)
    return RunSummary(
        agent=agent,
        seed=seed,
        per_episode_returns=returns,
        per_episode_mean_abs_td=np.asarray(mean_abs_td, dtype=np.float64),
        per_episode_update_ms=update_ms,
        avg_return_last_10pct=avg_last,
        mean_update_time_ms=float(update_ms.mean()) if update_ms.size else 0.0,
        convergence_episode=convergence,
    )


def median_or_none(values) -> float | None:
    """Median treating None as +inf; None when the median itself is +inf."""
    arr = np.array([math.inf if v is None else float(v) for v in values])
    med = float(np.median(arr))
    return None if math.isinf(med) else med
