"""Segment-based experience replay with per-segment trace reconstruction.

The buffer stores fixed-length contiguous transition sequences (segments) in
a bounded FIFO. Replaying a batch rebuilds eligibility traces from zero
inside every sampled segment and applies one aggregated update against the
table frozen at batch start.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContiguityViolation, InsufficientData, NonFiniteInput, NonFiniteUpdate


@dataclass(frozen=True)
class Transition:
    """One environment step: state, action, reward, next state."""

    s: np.ndarray
    a: float
    r: float
    s_next: np.ndarray


@dataclass(frozen=True)
class Segment:
    """Exactly L temporally contiguous transitions, stored columnwise."""

    states: np.ndarray       # (L, D)
    actions: np.ndarray      # (L,)
    rewards: np.ndarray      # (L,)
    next_states: np.ndarray  # (L, D)

    def __len__(self) -> int:
        return self.states.shape[0]


class ReplayBuffer:
    """Bounded FIFO of sealed segments plus one partial open segment."""

    def __init__(self, segment_length: int, capacity: int):
        if segment_length < 1:
            raise ValueError(f"segment_length must be >= 1, got {segment_length}")
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.segment_length = segment_length
        self.capacity = capacity
        self._segments: deque[Segment] = deque(maxlen=capacity)
        self._open: list[Transition] = []

    def __len__(self) -> int:
        return len(self._segments)

    @property
    def open_length(self) -> int:
        return len(self._open)

    def record(self, t: Transition) -> None:
        """Append a transition; seal the open segment when it reaches length L."""
        s = np.array(t.s, dtype=np.float64)
        s_next = np.array(t.s_next, dtype=np.float64)
        a = float(t.a)
        r = float(t.r)
        if not (np.isfinite(s).all() and np.isfinite(s_next).all()
                and math.isfinite(a) and math.isfinite(r)):
            raise NonFiniteInput("transition fields must be finite")
        if self._open and not np.array_equal(self._open[-1].s_next, s):
            raise ContiguityViolation(
                "transition state does not continue the open segment; "
                "call flush_open() at episode boundaries"
            )
        self._open.append(Transition(s, a, r, s_next))
        if len(self._open) == self.segment_length:
            self._seal()

    def _seal(self) -> None:
        self._segments.append(Segment(
            states=np.stack([t.s for t in self._open]),
            actions=np.array([t.a for t in self._open]),
            rewards=np.array([t.r for t in self._open]),
            next_states=np.stack([t.s_next for t in self._open]),
        ))
        self._open = []

    def flush_open(self) -> None:
        """Discard the partial open segment (short segments are never stored)."""
        self._open = []

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Segment]:
        """Draw batch_size segments uniformly without replacement."""
        if len(self._segments) < batch_size:
            raise InsufficientData(
                f"buffer holds {len(self._segments)} segments, need {batch_size}"
            )
        idx = rng.choice(len(self._segments), size=batch_size, replace=False)
        return [self._segments[i] for i in idx]

    def dump(self, path) -> None:
        """Write sealed segments as text, one transition per line.

        Line format: s components, action, reward, s' components. Segment
        boundaries are implicit every `segment_length` lines.
        """
        with open(path, "w") as fh:
            for seg in self._segments:
                for l in range(len(seg)):
                    fields = [*seg.states[l], seg.actions[l], seg.rewards[l],
                              *seg.next_states[l]]
                    fh.write(" ".join(f"{v:.17g}" for v in fields) + "\n")


def load_segments(path, segment_length: int) -> list[Segment]:
    """Rebuild segments from a `ReplayBuffer.dump` file."""
    rows = np.loadtxt(path, ndmin=2)
    if rows.shape[0] % segment_length != 0:
        raise ValueError("line count is not a multiple of segment_length")
    dim = (rows.shape[1] - 2) // 2
    segments = []
    for start in range(0, rows.shape[0], segment_length):
        block = rows[start:start + segment_length]
        segments.append(Segment(
            states=np.ascontiguousarray(block[:, :dim]),
            actions=np.ascontiguousarray(block[:, dim]),
            rewards=np.ascontiguousarray(block[:, dim + 1]),
            next_states=np.ascontiguousarray(block[:, dim + 2:]),
        ))
    return segments


def replay_batch(q, buf: ReplayBuffer, *, alpha: float, gamma: float, lam: float,
                 batch_size: int, state_partition, action_partition,
                 rng: np.random.Generator, backend=None) -> float:
    """One batched replay pass (sample, reconstruct traces, apply once).

    All TD errors are computed against the table as frozen at batch start;
    the aggregated increment is applied in a single (alpha / B) step.
    Returns the mean |delta| over the batch for diagnostics.
    """
    k = backend if backend is not None else kernels.default_backend()
    segs = buf.sample(batch_size, rng)
    states = np.stack([g.states for g in segs])
    actions = np.stack([g.actions for g in segs])
    rewards = np.stack([g.rewards for g in segs])
    next_states = np.stack([g.next_states for g in segs])

    qf = q.copy()
    rowmax = qf.max(axis=1)
    acc = np.zeros_like(q)
    sl = kernels.state_layout(state_partition)
    al = kernels.action_layout(action_partition)
    mean_abs = k.replay_accumulate(qf, rowmax, states, actions, rewards, next_states,
                                   *sl, *al, gamma, lam, acc)
    q += (alpha / batch_size) * acc
    if not np.isfinite(q.sum()):
        raise NonFiniteUpdate("replay update produced non-finite entries")
    return float(mean_abs)
