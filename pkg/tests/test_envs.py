"""Cart-pole simulator and the chain MDP fixture."""

import math

import numpy as np
import pytest

from efql.envs import (
    CartPoleEnv,
    CartPoleParams,
    ChainEnv,
    cartpole_energy,
    cartpole_reset,
    cartpole_step,
    chain_step,
    constant_reward_chain,
    default_chain,
)


class TestCartPoleReset:
    def test_zero_perturbation_is_rest_state(self):
        params = CartPoleParams(init_perturbation=0.0)
        state = cartpole_reset(params, np.random.default_rng(0))
        np.testing.assert_array_equal(state, np.zeros(4))

    def test_fixed_seed_reproducible(self):
        params = CartPoleParams()
        a = cartpole_reset(params, np.random.default_rng(42))
        b = cartpole_reset(params, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_perturbation_range(self):
        params = CartPoleParams()
        rng = np.random.default_rng(1)
        for _ in range(200):
            s = cartpole_reset(params, rng)
            assert abs(s[2]) <= params.init_perturbation
            assert s[0] == s[1] == s[3] == 0.0


class TestCartPoleStep:
    def test_equilibrium_unchanged(self):
        params = CartPoleParams()
        nxt, reward = cartpole_step(np.zeros(4), 0.0, params)
        np.testing.assert_array_equal(nxt, np.zeros(4))
        assert reward == 0.0

    def test_reward_angle_term(self):
        nxt, reward = cartpole_step(np.array([0, 0, 0.1, 0]), 0.0, CartPoleParams())
        assert reward == pytest.approx(-0.01, abs=1e-15)

    def test_reward_action_term(self):
        _, reward = cartpole_step(np.zeros(4), 2.0, CartPoleParams())
        assert reward == pytest.approx(-0.004, abs=1e-15)

    def test_force_clamped_in_reward_and_dynamics(self):
        params = CartPoleParams()
        n1, r1 = cartpole_step(np.zeros(4), 10.0, params)
        n2, r2 = cartpole_step(np.zeros(4), params.force_hi, params)
        np.testing.assert_array_equal(n1, n2)
        assert r1 == r2

    def test_reward_nonpositive_and_zero_only_at_origin(self):
        params = CartPoleParams()
        rng = np.random.default_rng(2)
        for _ in range(500):
            s = rng.uniform([-2, -3, -3, -4], [2, 3, 3, 4])
            a = rng.uniform(-2, 2)
            _, reward = cartpole_step(s, a, params)
            assert reward <= 0.0
            if reward == 0.0:
                assert np.all(s == 0.0) and a == 0.0

    def test_reward_formula_spot_check(self):
        # independent evaluation of the quadratic penalty
        params = CartPoleParams()
        rng = np.random.default_rng(3)
        for _ in range(1000):
            s = rng.uniform([-2.4, -3, -math.pi, -4], [2.4, 3, math.pi, 4])
            a = rng.uniform(-2, 2)
            _, reward = cartpole_step(s, a, params)
            x, xd, th, thd = s
            expected = -(th * th + 0.1 * (thd * thd) + 0.001 * (x * x)
                         + 0.0001 * (xd * xd) + 0.001 * (a * a))
            assert abs(reward - expected) <= 1e-15

    def test_deterministic(self):
        params = CartPoleParams()
        s = np.array([0.1, -0.2, 0.05, 0.3])
        a1 = cartpole_step(s, 1.3, params)
        a2 = cartpole_step(s, 1.3, params)
        np.testing.assert_array_equal(a1[0], a2[0])
        assert a1[1] == a2[1]

    def test_theta_wrapped(self):
        params = CartPoleParams()
        s = np.array([0.0, 0.0, 3.1, 5.0])  # about to cross pi
        nxt, _ = cartpole_step(s, 0.0, params)
        assert -math.pi < nxt[2] <= math.pi

    def test_falls_from_small_perturbation_without_control(self):
        # the upright equilibrium is unstable; theta must grow unforced
        params = CartPoleParams()
        s = np.array([0.0, 0.0, 0.01, 0.0])
        for _ in range(200):
            s, _ = cartpole_step(s, 0.0, params)
        assert abs(s[2]) > 0.5


class TestEnergy:
    def test_small_oscillation_drift_under_2pct(self):
        # integrator gate: perturbations around the stable (hanging)
        # equilibrium stay small, so the flow is well resolved at dt=0.02
        params = CartPoleParams()
        s = np.array([0.0, 0.0, math.pi - 0.05, 0.0])
        e0 = cartpole_energy(s, params)
        worst = 0.0
        for _ in range(500):
            s, _ = cartpole_step(s, 0.0, params)
            worst = max(worst, abs(cartpole_energy(s, params) - e0))
        assert worst / abs(e0) < 0.02

    def test_full_swing_drift_bounded(self):
        # a fall from near-upright swings through high angular rates; the
        # first-order integrator oscillates in energy but must stay bounded
        params = CartPoleParams()
        s = np.array([0.0, 0.0, 0.05, 0.0])
        e0 = cartpole_energy(s, params)
        worst = 0.0
        for _ in range(500):
            s, _ = cartpole_step(s, 0.0, params)
            worst = max(worst, abs(cartpole_energy(s, params) - e0))
        assert worst / abs(e0) < 0.20


class TestCartPoleEnv:
    def test_reset_step_loop(self):
        env = CartPoleEnv(rng=np.random.default_rng(4))
        s = env.reset()
        assert s.shape == (4,)
        nxt, reward = env.step(0.5)
        assert nxt.shape == (4,)
        assert reward <= 0.0

    def test_seeded_trajectories_match(self):
        def run(seed):
            env = CartPoleEnv(rng=np.random.default_rng(seed))
            s = env.reset()
            out = [s]
            for i in range(50):
                s, _ = env.step(math.sin(i))
                out.append(s)
            return np.stack(out)

        np.testing.assert_array_equal(run(5), run(5))


class TestChain:
    def test_fixed_point_of_fixture(self):
        assert chain_step(default_chain(), 0.0, 0.0) == (0.0, 0.0)

    def test_fixture_arithmetic(self):
        s_next, reward = chain_step(default_chain(), 0.5, -2.0)
        assert s_next == pytest.approx(0.3)
        assert reward == pytest.approx(-0.09)

    def test_boundary_clamp(self):
        s_next, _ = chain_step(default_chain(), 1.0, 2.0)
        assert s_next == 1.0
        s_next, _ = chain_step(default_chain(), -1.0, -2.0)
        assert s_next == -1.0

    def test_constant_reward_variant(self):
        mdp = constant_reward_chain(rbar=0.7)
        for s, a in ((0.0, 0.0), (0.5, -2.0), (-1.0, 1.0)):
            assert chain_step(mdp, s, a)[1] == 0.7

    def test_env_wrapper(self):
        env = ChainEnv(rng=np.random.default_rng(6))
        s = env.reset()
        assert s.shape == (1,)
        assert -1.0 <= s[0] <= 1.0
        nxt, reward = env.step(1.0)
        assert nxt[0] == pytest.approx(min(s[0] + 0.1, 1.0))
        assert reward == pytest.approx(-nxt[0] ** 2)
