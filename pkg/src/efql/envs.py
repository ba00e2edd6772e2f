"""Environments: a deterministic cart-pole simulator and a tiny chain MDP.

The cart-pole task is stabilization from small near-upright perturbations
under a +/-2 N force budget, with a quadratic penalty reward and fixed
500-step episodes (no early termination: rewards are negative, so ending an
episode early would reward failing fast). The physics evolves unclamped;
states are clamped to partition ranges only when fuzzified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteState
from .fuzzy import ActionPartition, StatePartition, build_action_partition, build_state_partition

# cart-pole fuzzification grid: x, x_dot, theta, theta_dot
CARTPOLE_STATE_RANGES = ((-2.4, 2.4), (-3.0, 3.0), (-0.26, 0.26), (-2.0, 2.0))
CARTPOLE_STATE_COUNTS = (3, 3, 7, 5)
CARTPOLE_ACTION_COUNT = 5


@dataclass(frozen=True)
class CartPoleParams:
    """Bench-scale rig constants; pole_half_length is half the pole.

    The defaults are a light cart and pole: stabilization under a +/-2 N
    force budget needs a proportional gain above gravity * total mass, and
    the SoftMax-defuzzified policy tops out near 2 N/rad, so the classical
    1.0/0.1 kg benchmark masses would be impossible to balance for any
    table this rule base can express.
    """

    cart_mass: float = 0.1
    pole_mass: float = 0.02
    pole_half_length: float = 0.5
    gravity: float = 9.8
    dt: float = 0.02
    force_lo: float = -2.0
    force_hi: float = 2.0
    max_steps: int = 500
    init_perturbation: float = 0.05


def cartpole_reset(params: CartPoleParams, rng: np.random.Generator) -> np.ndarray:
    """Upright rest state with a uniform random pole-angle perturbation."""
    theta = rng.uniform(-params.init_perturbation, params.init_perturbation)
    return np.array([0.0, 0.0, theta, 0.0])


def _wrap_angle(theta: float) -> float:
    # map into (-pi, pi]; remainder() is exact for |theta| < pi
    theta = math.remainder(theta, 2.0 * math.pi)
    if theta == -math.pi:
        theta = math.pi
    return theta


def cartpole_step(state: np.ndarray, force: float, params: CartPoleParams) -> tuple[np.ndarray, float]:
    """One semi-implicit Euler step (velocities first, then positions).

    The reward is the quadratic penalty on the pre-step state and the
    applied (clamped) force:
        r = -(theta^2 + 0.1 theta_dot^2 + 0.001 x^2 + 0.0001 x_dot^2 + 0.001 a^2)
    """
    x, x_dot, theta, theta_dot = (float(v) for v in state)
    f = min(max(float(force), params.force_lo), params.force_hi)
    reward = -(theta * theta + 0.1 * (theta_dot * theta_dot) + 0.001 * (x * x)
               + 0.0001 * (x_dot * x_dot) + 0.001 * (f * f))

    mc, mp = params.cart_mass, params.pole_mass
    l, g, dt = params.pole_half_length, params.gravity, params.dt
    total = mc + mp
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    tmp = (-f - mp * l * theta_dot * theta_dot * sin_t) / total
    theta_acc = (g * sin_t + cos_t * tmp) / (l * (4.0 / 3.0 - mp * cos_t * cos_t / total))
    x_acc = (f + mp * l * (theta_dot * theta_dot * sin_t - theta_acc * cos_t)) / total

    x_dot += x_acc * dt
    theta_dot += theta_acc * dt
    x += x_dot * dt
    theta = _wrap_angle(theta + theta_dot * dt)

    nxt = np.array([x, x_dot, theta, theta_dot])
    if not np.isfinite(nxt).all():
        raise NonFiniteState(f"cart-pole integration diverged: {nxt}")
    return nxt, reward


def cartpole_energy(state: np.ndarray, params: CartPoleParams) -> float:
    """Total mechanical energy (uniform-rod pole, potential zero at the pivot)."""
    x, x_dot, theta, theta_dot = (float(v) for v in state)
    mp, l = params.pole_mass, params.pole_half_length
    vx = x_dot + l * theta_dot * math.cos(theta)
    vy = -l * theta_dot * math.sin(theta)
    kinetic = (0.5 * params.cart_mass * x_dot * x_dot
               + 0.5 * mp * (vx * vx + vy * vy)
               + 0.5 * (mp * l * l / 3.0) * theta_dot * theta_dot)
    return kinetic + mp * params.gravity * l * math.cos(theta)


class CartPoleEnv:
    """Stateful wrapper around the pure step/reset functions."""

    def __init__(self, params: CartPoleParams | None = None,
                 rng: np.random.Generator | None = None):
        self.params = params or CartPoleParams()
        self.rng = rng if rng is not None else np.random.default_rng()
        self._state = cartpole_reset(self.params, self.rng)

    def reset(self) -> np.ndarray:
        self._state = cartpole_reset(self.params, self.rng)
        return self._state

    def step(self, force: float) -> tuple[np.ndarray, float]:
        self._state, reward = cartpole_step(self._state, force, self.params)
        return self._state, reward


def default_cartpole_partitions() -> tuple[StatePartition, ActionPartition]:
    sp = build_state_partition(CARTPOLE_STATE_RANGES, CARTPOLE_STATE_COUNTS)
    ap = build_action_partition(-2.0, 2.0, CARTPOLE_ACTION_COUNT)
    return sp, ap


@dataclass(frozen=True)
class ChainMDP:
    """Deterministic 1-D MDP used as the operator-verification fixture."""

    transition: Callable[[float, float], float]
    reward: Callable[[float, float], float]
    state_lo: float = -1.0
    state_hi: float = 1.0
    gamma: float = 0.9


def default_chain(gamma: float = 0.9) -> ChainMDP:
    """s' = clamp(s + 0.1 a, -1, 1), r = -s'^2."""
    def transition(s: float, a: float) -> float:
        return min(max(s + 0.1 * a, -1.0), 1.0)

    def reward(s: float, a: float) -> float:
        nxt = transition(s, a)
        return -nxt * nxt

    return ChainMDP(transition=transition, reward=reward, gamma=gamma)


def constant_reward_chain(rbar: float = 1.0, gamma: float = 0.5) -> ChainMDP:
    """Same walk as the default fixture but every reward equals rbar."""
    base = default_chain(gamma)
    return ChainMDP(transition=base.transition, reward=lambda s, a: rbar,
                    state_lo=base.state_lo, state_hi=base.state_hi, gamma=gamma)


def chain_step(mdp: ChainMDP, s: float, a: float) -> tuple[float, float]:
    """Deterministic next state and reward."""
    return mdp.transition(s, a), mdp.reward(s, a)


class ChainEnv:
    """Episodic wrapper over a ChainMDP; states are length-1 vectors."""

    def __init__(self, mdp: ChainMDP | None = None,
                 rng: np.random.Generator | None = None):
        self.mdp = mdp or default_chain()
        self.rng = rng if rng is not None else np.random.default_rng()
        self._s = 0.0

    def reset(self) -> np.ndarray:
        self._s = float(self.rng.uniform(self.mdp.state_lo, self.mdp.state_hi))
        return np.array([self._s])

    def step(self, action: float) -> tuple[np.ndarray, float]:
        self._s, reward = chain_step(self.mdp, self._s, float(action))
        return np.array([self._s]), reward


def default_chain_partitions() -> tuple[StatePartition, ActionPartition]:
    sp = build_state_partition([(-1.0, 1.0)], [5])
    ap = build_action_partition(-2.0, 2.0, 5)
    return sp, ap
