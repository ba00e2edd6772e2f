"""Segment buffer and batched replay with trace reconstruction."""

import numpy as np
import pytest

from efql import kernels
from efql.errors import ContiguityViolation, InsufficientData
from efql.fuzzy import (
    action_membership,
    build_action_partition,
    build_state_partition,
    fuzzy_value,
    joint_state_membership,
    normalize_weights,
)
from efql.replay import ReplayBuffer, Transition, load_segments, replay_batch
from efql.traces import activation


def trans(s, a, r, s_next):
    return Transition(np.atleast_1d(np.array(s, dtype=float)), a, r,
                      np.atleast_1d(np.array(s_next, dtype=float)))


def random_walk(rng, n, dim=1):
    """Contiguous transitions: each state continues the previous next state."""
    out = []
    s = rng.uniform(-1, 1, dim)
    for _ in range(n):
        s_next = rng.uniform(-1, 1, dim)
        out.append(trans(s, float(rng.uniform(-2, 2)), float(rng.uniform(-1, 0)), s_next))
        s = s_next
    return out


class TestRecord:
    def test_exact_fill_seals(self):
        buf = ReplayBuffer(segment_length=2, capacity=4)
        buf.record(trans([0.0], 1.0, -1.0, [0.5]))
        buf.record(trans([0.5], 0.0, -1.0, [0.7]))
        assert len(buf) == 1
        assert buf.open_length == 0

    def test_fifo_eviction(self):
        buf = ReplayBuffer(segment_length=1, capacity=1)
        buf.record(trans([0.0], 0.0, -1.0, [0.1]))
        first = buf.sample(1, np.random.default_rng(0))[0]
        buf.record(trans([0.1], 0.0, -2.0, [0.2]))
        assert len(buf) == 1
        kept = buf.sample(1, np.random.default_rng(0))[0]
        assert kept.rewards[0] == -2.0
        assert first.rewards[0] == -1.0

    def test_contiguity_violation(self):
        buf = ReplayBuffer(segment_length=3, capacity=4)
        buf.record(trans([0.0], 0.0, -1.0, [0.5]))
        with pytest.raises(ContiguityViolation):
            buf.record(trans([0.4], 0.0, -1.0, [0.6]))

    def test_contiguity_not_required_across_segments(self):
        buf = ReplayBuffer(segment_length=1, capacity=4)
        buf.record(trans([0.0], 0.0, -1.0, [0.5]))
        buf.record(trans([0.9], 0.0, -1.0, [0.3]))  # new segment, fresh start
        assert len(buf) == 2

    def test_sealed_segments_are_contiguous_random_episodes(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            n = int(rng.integers(1, 12))
            seg_len = int(rng.integers(1, 4))
            buf = ReplayBuffer(segment_length=seg_len, capacity=100)
            for t in random_walk(rng, n):
                buf.record(t)
            buf.flush_open()
            for seg in buf._segments:
                assert len(seg) == seg_len
                np.testing.assert_array_equal(seg.next_states[:-1], seg.states[1:])


class TestFlushOpen:
    def test_partial_discarded(self):
        buf = ReplayBuffer(segment_length=5, capacity=4)
        for t in random_walk(np.random.default_rng(2), 3):
            buf.record(t)
        buf.flush_open()
        assert len(buf) == 0
        assert buf.open_length == 0

    def test_noop_on_empty(self):
        buf = ReplayBuffer(segment_length=5, capacity=4)
        buf.flush_open()
        assert len(buf) == 0

    def test_sealed_retained(self):
        buf = ReplayBuffer(segment_length=2, capacity=4)
        for t in random_walk(np.random.default_rng(3), 5):
            buf.record(t)
        buf.flush_open()
        assert len(buf) == 2


class TestSample:
    def test_exact_buffer_returned(self):
        buf = ReplayBuffer(segment_length=1, capacity=8)
        for t in random_walk(np.random.default_rng(4), 3):
            buf.record(t)
        segs = buf.sample(3, np.random.default_rng(0))
        assert len(segs) == 3
        rewards = sorted(s.rewards[0] for s in segs)
        assert len(set(rewards)) == 3  # without replacement

    def test_insufficient_data(self):
        buf = ReplayBuffer(segment_length=1, capacity=8)
        buf.record(trans([0.0], 0.0, -1.0, [0.1]))
        with pytest.raises(InsufficientData):
            buf.sample(2, np.random.default_rng(0))

    def test_reseeded_rng_reproduces_sample(self):
        buf = ReplayBuffer(segment_length=1, capacity=32)
        for t in random_walk(np.random.default_rng(5), 20):
            buf.record(t)
        a = buf.sample(5, np.random.default_rng(7))
        b = buf.sample(5, np.random.default_rng(7))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.states, y.states)


class TestDump:
    def test_round_trip(self, tmp_path):
        buf = ReplayBuffer(segment_length=3, capacity=16)
        for t in random_walk(np.random.default_rng(6), 10, dim=2):
            buf.record(t)
        buf.flush_open()
        path = tmp_path / "buffer.txt"
        buf.dump(path)
        loaded = load_segments(path, 3)
        assert len(loaded) == len(buf)
        for orig, back in zip(buf._segments, loaded):
            np.testing.assert_array_equal(orig.states, back.states)
            np.testing.assert_array_equal(orig.actions, back.actions)
            np.testing.assert_array_equal(orig.rewards, back.rewards)
            np.testing.assert_array_equal(orig.next_states, back.next_states)


def _fixture_partitions():
    sp = build_state_partition([(-1, 1)], [5])
    ap = build_action_partition(-2, 2, 5)
    return sp, ap


class TestReplayBatch:
    def test_single_transition_hand_unrolled(self):
        # B=1, L=1, zero table, r=1, gamma=0: the update is alpha * zeta
        sp, ap = _fixture_partitions()
        buf = ReplayBuffer(segment_length=1, capacity=4)
        s, a = np.array([0.3]), 0.7
        buf.record(trans(s, a, 1.0, [0.5]))
        q = np.zeros((sp.rule_count, ap.action_count))
        alpha = 0.05
        replay_batch(q, buf, alpha=alpha, gamma=0.0, lam=0.8, batch_size=1,
                     state_partition=sp, action_partition=ap,
                     rng=np.random.default_rng(0))
        zeta = activation(joint_state_membership(sp, s), action_membership(ap, a))
        np.testing.assert_allclose(q, alpha * zeta, atol=1e-15)

    def test_zero_rewards_zero_table_no_change(self):
        sp, ap = _fixture_partitions()
        buf = ReplayBuffer(segment_length=2, capacity=8)
        rng = np.random.default_rng(7)
        for t in random_walk(rng, 8):
            buf.record(trans(t.s, t.a, 0.0, t.s_next))
        q = np.zeros((sp.rule_count, ap.action_count))
        mean_abs = replay_batch(q, buf, alpha=0.05, gamma=0.99, lam=0.8, batch_size=3,
                                state_partition=sp, action_partition=ap,
                                rng=np.random.default_rng(0))
        np.testing.assert_array_equal(q, 0.0)
        assert mean_abs == 0.0

    def test_duplicate_segments_scale_invariance(self):
        # two identical segments with B=2 produce the same update as B=1
        sp, ap = _fixture_partitions()
        rng = np.random.default_rng(8)
        walk = random_walk(rng, 2)

        buf1 = ReplayBuffer(segment_length=2, capacity=4)
        for t in walk:
            buf1.record(t)
        buf2 = ReplayBuffer(segment_length=2, capacity=4)
        for t in walk + walk[:0]:
            buf2.record(t)
        for t in walk:  # second identical segment (restart is allowed)
            buf2.record(t)

        q0 = rng.normal(size=(sp.rule_count, ap.action_count))
        q1 = q0.copy()
        q2 = q0.copy()
        replay_batch(q1, buf1, alpha=0.05, gamma=0.9, lam=0.7, batch_size=1,
                     state_partition=sp, action_partition=ap,
                     rng=np.random.default_rng(0))
        replay_batch(q2, buf2, alpha=0.05, gamma=0.9, lam=0.7, batch_size=2,
                     state_partition=sp, action_partition=ap,
                     rng=np.random.default_rng(0))
        np.testing.assert_allclose(q1, q2, atol=1e-13)

    def test_insufficient_data(self):
        sp, ap = _fixture_partitions()
        buf = ReplayBuffer(segment_length=1, capacity=4)
        buf.record(trans([0.0], 0.0, -1.0, [0.1]))
        with pytest.raises(InsufficientData):
            replay_batch(np.zeros((sp.rule_count, ap.action_count)), buf,
                         alpha=0.05, gamma=0.9, lam=0.7, batch_size=2,
                         state_partition=sp, action_partition=ap,
                         rng=np.random.default_rng(0))

    def test_frozen_table_segment_order_invariance(self):
        # permuting segments inside a batch only reorders the accumulation
        sp, ap = _fixture_partitions()
        sl = kernels.state_layout(sp)
        al = kernels.action_layout(ap)
        rng = np.random.default_rng(9)
        n_batch, seg_len = 6, 3
        states = rng.uniform(-1, 1, (n_batch, seg_len, 1))
        next_states = rng.uniform(-1, 1, (n_batch, seg_len, 1))
        acts = rng.uniform(-2, 2, (n_batch, seg_len))
        rews = rng.uniform(-1, 0, (n_batch, seg_len))
        qf = rng.normal(size=(sp.rule_count, ap.action_count))
        rowmax = qf.max(axis=1)
        k = kernels.default_backend()

        acc1 = np.zeros_like(qf)
        k.replay_accumulate(qf, rowmax, states, acts, rews, next_states,
                            *sl, *al, 0.99, 0.8, acc1)
        perm = np.random.default_rng(10).permutation(n_batch)
        acc2 = np.zeros_like(qf)
        k.replay_accumulate(qf, rowmax, states[perm], acts[perm], rews[perm],
                            next_states[perm], *sl, *al, 0.99, 0.8, acc2)
        np.testing.assert_allclose(acc1, acc2, atol=1e-12)

    def test_fixed_point_table_zero_update(self):
        # gamma=0 and a table equal to each transition's reward: delta == 0
        sp, ap = _fixture_partitions()
        buf = ReplayBuffer(segment_length=2, capacity=8)
        rng = np.random.default_rng(11)
        for t in random_walk(rng, 8):
            buf.record(trans(t.s, t.a, -0.25, t.s_next))
        q = np.full((sp.rule_count, ap.action_count), -0.25)
        replay_batch(q, buf, alpha=0.1, gamma=0.0, lam=0.8, batch_size=4,
                     state_partition=sp, action_partition=ap,
                     rng=np.random.default_rng(0))
        np.testing.assert_allclose(q, -0.25, atol=1e-15)

    def test_mean_abs_delta_value(self):
        sp, ap = _fixture_partitions()
        buf = ReplayBuffer(segment_length=1, capacity=4)
        buf.record(trans([0.0], 0.0, 1.0, [0.0]))
        q = np.zeros((sp.rule_count, ap.action_count))
        mean_abs = replay_batch(q, buf, alpha=0.01, gamma=0.0, lam=0.0, batch_size=1,
                                state_partition=sp, action_partition=ap,
                                rng=np.random.default_rng(0))
        assert mean_abs == pytest.approx(1.0)
