"""Learning agents: the replayed fuzzy Q(lambda) learner and two baselines.

All three agents share the same fuzzy partitions, epsilon-greedy exploration
schedule, and SoftMax-defuzzified greedy action; they differ only in the
update rule. One agent instance must be driven by a single thread; distinct
instances (different seeds) are fully independent.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import NonFiniteUpdate, ParameterOutOfRange
from .fuzzy import ActionPartition, StatePartition, new_q_table
from .replay import ReplayBuffer, Transition, replay_batch
from .traces import new_traces, reset_traces

AGENT_NAMES = ("enhanced-fql", "nstep-fql", "fuzzy-sarsa")


@dataclass(frozen=True)
class AgentConfig:
    """Learning hyperparameters; defaults are the tuned cart-pole values."""

    alpha: float = 0.005
    gamma: float = 0.99
    lam: float = 0.8
    beta: float = 1.0
    epsilon_start: float = 0.2
    epsilon_end: float = 0.05
    epsilon_decay_episodes: int = 500
    segment_length: int = 10
    batch_size: int = 32
    buffer_capacity: int = 500
    replay_interval: int = 10   # 0 disables replay (and transition recording)
    n_step: int = 5             # baselines only
    # Optimistic table initialization. Rewards here are always <= 0, and the
    # SoftMax score w_i * rowmax_i inverts its ordering in w once row maxima
    # go negative (relevant rules lose vote weight), so a zero-initialized
    # table can never express a stabilizing controller; starting optimistic
    # keeps the vote relevance-ordered while the policy is learned.
    q_init: float = 30.0
    # optional Robbins-Monro schedule alpha_t = alpha / (1 + t/tau), used by
    # the operator-convergence runs; None keeps alpha constant
    alpha_decay_tau: float | None = None

    def validate(self) -> "AgentConfig":
        if not self.alpha > 0:
            raise ParameterOutOfRange(f"alpha must be > 0, got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterOutOfRange(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.lam <= 1.0:
            raise ParameterOutOfRange(f"lambda must lie in [0, 1], got {self.lam}")
        if not self.beta > 0:
            raise ParameterOutOfRange(f"beta must be > 0, got {self.beta}")
        for name in ("epsilon_start", "epsilon_end"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterOutOfRange(f"{name} must lie in [0, 1], got {v}")
        if self.epsilon_decay_episodes < 1:
            raise ParameterOutOfRange("epsilon_decay_episodes must be >= 1")
        if self.segment_length < 1 or self.batch_size < 1 or self.buffer_capacity < 1:
            raise ParameterOutOfRange("segment_length, batch_size, buffer_capacity must be >= 1")
        if self.replay_interval < 0:
            raise ParameterOutOfRange("replay_interval must be >= 0")
        if self.n_step < 1:
            raise ParameterOutOfRange("n_step must be >= 1")
        if not math.isfinite(self.q_init):
            raise ParameterOutOfRange("q_init must be finite")
        if self.alpha_decay_tau is not None and not self.alpha_decay_tau > 0:
            raise ParameterOutOfRange("alpha_decay_tau must be > 0 when set")
        return self


class FuzzyAgentBase:
    """Shared state: partitions, table, exploration schedule, kernel backend."""

    on_policy = False

    def __init__(self, state_partition: StatePartition, action_partition: ActionPartition,
                 config: AgentConfig, rng: np.random.Generator, backend=None):
        self.sp = state_partition
        self.ap = action_partition
        self.cfg = config.validate()
        self.rng = rng
        self.k = backend if backend is not None else kernels.default_backend()
        self.q = new_q_table(state_partition.rule_count, action_partition.action_count)
        if config.q_init != 0.0:
            self.q.fill(config.q_init)
        self.step_count = 0
        self.episode_count = 0
        self._sl = kernels.state_layout(state_partition)
        self._al = kernels.action_layout(action_partition)
        n_rules = state_partition.rule_count
        self._mu_s = np.empty(n_rules)
        self._mu_n = np.empty(n_rules)
        self._mu_a = np.empty(action_partition.action_count)
        self._mu_a2 = np.empty(action_partition.action_count)
        self._work = np.empty(self._sl.centers.size)
        self._scores = np.empty(n_rules)
        self._jstar = np.empty(n_rules, dtype=np.int64)

    def epsilon(self) -> float:
        """Linear decay from epsilon_start to epsilon_end, then flat."""
        cfg = self.cfg
        frac = min(self.episode_count / cfg.epsilon_decay_episodes, 1.0)
        return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac

    def current_alpha(self) -> float:
        cfg = self.cfg
        if cfg.alpha_decay_tau is None:
            return cfg.alpha
        return cfg.alpha / (1.0 + self.step_count / cfg.alpha_decay_tau)

    def select_action(self, s) -> tuple[float, bool]:
        """Epsilon-greedy: uniform force on the epsilon branch, else defuzzified greedy."""
        if self.rng.random() < self.epsilon():
            return float(self.rng.uniform(self.ap.range_lo, self.ap.range_hi)), True
        s = np.ascontiguousarray(s, dtype=np.float64)
        self.k.joint_membership(*self._sl, s, self._mu_s, self._work)
        a = self.k.greedy_action(self.q, self._mu_s, self.cfg.beta, self._al.centers,
                                 self._scores, self._jstar)
        return float(a), False

    def begin_episode(self) -> None:
        pass

    def end_episode(self) -> None:
        self.episode_count += 1

    def _memberships(self, s, a, s_next):
        s = np.ascontiguousarray(s, dtype=np.float64)
        s_next = np.ascontiguousarray(s_next, dtype=np.float64)
        self.k.joint_membership(*self._sl, s, self._mu_s, self._work)
        self.k.joint_membership(*self._sl, s_next, self._mu_n, self._work)
        self.k.action_membership(*self._al, float(a), self._mu_a)


class EnhancedFQLAgent(FuzzyAgentBase):
    """Off-policy fuzzy Q(lambda) with Watkins trace resets and segment replay."""

    def __init__(self, state_partition, action_partition, config, rng, backend=None):
        super().__init__(state_partition, action_partition, config, rng, backend)
        self.traces = new_traces(self.sp.rule_count, self.ap.action_count)
        self.buffer = ReplayBuffer(config.segment_length, config.buffer_capacity)

    def begin_episode(self) -> None:
        # an episode reset teleports the state, so stale credit is wrong
        reset_traces(self.traces)

    def step(self, s, a, r, s_next, exploratory: bool) -> float:
        """One learning update; returns the scalar TD diagnostic r + g*Y' - Y."""
        cfg = self.cfg
        alpha = self.current_alpha()
        self.step_count += 1
        if cfg.replay_interval > 0:
            self.buffer.record(Transition(s, float(a), float(r), s_next))
        self._memberships(s, a, s_next)
        ups_s = self.k.upsilon(self.q, self._mu_s)
        ups_n = self.k.upsilon(self.q, self._mu_n)
        ok = self.k.trace_and_update(self.q, self.traces, self._mu_s, self._mu_a,
                                     float(r), ups_n, cfg.gamma, cfg.lam, alpha)
        if not ok:
            raise NonFiniteUpdate("online update produced non-finite entries")
        if exploratory:
            reset_traces(self.traces)
        if (cfg.replay_interval > 0 and self.step_count % cfg.replay_interval == 0
                and len(self.buffer) >= cfg.batch_size):
            replay_batch(self.q, self.buffer, alpha=alpha, gamma=cfg.gamma,
                         lam=cfg.lam, batch_size=cfg.batch_size,
                         state_partition=self.sp, action_partition=self.ap,
                         rng=self.rng, backend=self.k)
        return float(r) + cfg.gamma * ups_n - ups_s

    def end_episode(self) -> None:
        self.buffer.flush_open()
        super().end_episode()


class NStepFQLAgent(FuzzyAgentBase):
    """Multi-step fuzzy Q-learning baseline: n-step returns, no traces, no replay."""

    def __init__(self, state_partition, action_partition, config, rng, backend=None):
        super().__init__(state_partition, action_partition, config, rng, backend)
        self._window: deque = deque()

    def step(self, s, a, r, s_next, exploratory: bool) -> float:
        self.step_count += 1
        self._window.append((np.array(s, dtype=np.float64), float(a), float(r),
                             np.array(s_next, dtype=np.float64)))
        if len(self._window) == self.cfg.n_step:
            return self._update_oldest()
        return 0.0

    def _update_oldest(self) -> float:
        """Apply the m-step bootstrapped return to the oldest window entry."""
        cfg = self.cfg
        g = 0.0
        discount = 1.0
        for (_, _, r_k, _) in self._window:
            g += discount * r_k
            discount *= cfg.gamma
        s_tail = self._window[-1][3]
        s_tail = np.ascontiguousarray(s_tail, dtype=np.float64)
        self.k.joint_membership(*self._sl, s_tail, self._mu_n, self._work)
        g += discount * self.k.upsilon(self.q, self._mu_n)

        s0, a0, _, _ = self._window.popleft()
        s0 = np.ascontiguousarray(s0, dtype=np.float64)
        self.k.joint_membership(*self._sl, s0, self._mu_s, self._work)
        self.k.action_membership(*self._al, a0, self._mu_a)
        diag = g - self.k.upsilon(self.q, self._mu_s)
        ok = self.k.scaled_activation_update(self.q, self._mu_s, self._mu_a,
                                             g, self.current_alpha())
        if not ok:
            raise NonFiniteUpdate("n-step update produced non-finite entries")
        return diag

    def end_episode(self) -> None:
        while self._window:
            self._update_oldest()
        super().end_episode()


class FuzzySARSAAgent(FuzzyAgentBase):
    """On-policy fuzzy SARSA(lambda); traces persist through exploration."""

    on_policy = True

    def __init__(self, state_partition, action_partition, config, rng, backend=None):
        super().__init__(state_partition, action_partition, config, rng, backend)
        self.traces = new_traces(self.sp.rule_count, self.ap.action_count)

    def begin_episode(self) -> None:
        reset_traces(self.traces)

    def step(self, s, a, r, s_next, a_next: float) -> float:
        """SARSA backup toward the doubly weighted value of (s', a')."""
        cfg = self.cfg
        alpha = self.current_alpha()
        self.step_count += 1
        self._memberships(s, a, s_next)
        self.k.action_membership(*self._al, float(a_next), self._mu_a2)
        ups_on_next = self.k.bilinear_value(self.q, self._mu_n, self._mu_a2)
        ups_on_cur = self.k.bilinear_value(self.q, self._mu_s, self._mu_a)
        ok = self.k.trace_and_update(self.q, self.traces, self._mu_s, self._mu_a,
                                     float(r), ups_on_next, cfg.gamma, cfg.lam, alpha)
        if not ok:
            raise NonFiniteUpdate("SARSA update produced non-finite entries")
        return float(r) + cfg.gamma * ups_on_next - ups_on_cur


def make_agent(name: str, state_partition, action_partition, config: AgentConfig,
               rng: np.random.Generator, backend=None) -> FuzzyAgentBase:
    classes = {
        "enhanced-fql": EnhancedFQLAgent,
        "nstep-fql": NStepFQLAgent,
        "fuzzy-sarsa": FuzzySARSAAgent,
    }
    if name not in classes:
        raise ValueError(f"unknown agent {name!r}; valid agents: {', '.join(AGENT_NAMES)}")
    return classes[name](state_partition, action_partition, config, rng, backend)


@dataclass(frozen=True)
class EpisodeLog:
    """Per-episode record; wall-clock timing is excluded from equality."""

    episode_return: float
    steps: int
    mean_abs_td: float
    update_time_ms: float = field(compare=False)


def run_episode(agent: FuzzyAgentBase, env, max_steps: int) -> EpisodeLog:
    """Drive one fixed-horizon episode; timing covers only agent.step calls."""
    s = env.reset()
    agent.begin_episode()
    total = 0.0
    abs_td = 0.0
    update_ns = 0
    if agent.on_policy and max_steps > 0:
        a, _ = agent.select_action(s)
    for _ in range(max_steps):
        if not agent.on_policy:
            a, exploratory = agent.select_action(s)
        s_next, r = env.step(a)
        total += r
        if agent.on_policy:
            a_next, _ = agent.select_action(s_next)
            t0 = time.perf_counter_ns()
            diag = agent.step(s, a, r, s_next, a_next)
            update_ns += time.perf_counter_ns() - t0
            a = a_next
        else:
            t0 = time.perf_counter_ns()
            diag = agent.step(s, a, r, s_next, exploratory)
            update_ns += time.perf_counter_ns() - t0
        abs_td += abs(diag)
        s = s_next
    agent.end_episode()
    if max_steps > 0:
        return EpisodeLog(total, max_steps, abs_td / max_steps,
                          update_ns / max_steps / 1e6)
    return EpisodeLog(0.0, 0, 0.0, 0.0)


def derive_config(config: AgentConfig, **overrides) -> AgentConfig:
    """Config with selected fields replaced (validated)."""
    return replace(config, **overrides).validate()
