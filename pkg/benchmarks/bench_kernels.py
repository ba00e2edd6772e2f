#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-NumPy twin.

Times the hot operations at cart-pole scale (315 x 5 table) plus a full
training episode per backend, and prints a speedup table.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from efql import kernels
from efql.agents import AgentConfig, make_agent, run_episode
from efql.envs import CartPoleEnv, default_cartpole_partitions


def timeit(fn, repeat, warmup=3):
    for _ in range(warmup):
        fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_backend(name, repeat):
    k = kernels.get_backend(name)
    sp, ap = default_cartpole_partitions()
    sl = kernels.state_layout(sp)
    al = kernels.action_layout(ap)
    n_rules, n_acts = sp.rule_count, ap.action_count
    rng = np.random.default_rng(0)

    q = rng.normal(size=(n_rules, n_acts))
    e = np.zeros_like(q)
    mu = np.empty(n_rules)
    mu_a = np.empty(n_acts)
    work = np.empty(sl.centers.size)
    scores = np.empty(n_rules)
    jstar = np.empty(n_rules, dtype=np.int64)
    s = np.array([0.3, -1.2, 0.05, 0.4])
    k.joint_membership(*sl, s, mu, work)
    k.action_membership(*al, 0.7, mu_a)

    batch, seg_len = 32, 10
    states = rng.uniform(-1, 1, (batch, seg_len, 4))
    next_states = rng.uniform(-1, 1, (batch, seg_len, 4))
    actions = rng.uniform(-2, 2, (batch, seg_len))
    rewards = rng.uniform(-1, 0, (batch, seg_len))
    rowmax = q.max(axis=1)
    acc = np.zeros_like(q)

    times = {
        "joint_membership": timeit(
            lambda: k.joint_membership(*sl, s, mu, work), repeat * 10),
        "greedy_action": timeit(
            lambda: k.greedy_action(q, mu, 1.0, al.centers, scores, jstar),
            repeat * 10),
        "trace_and_update": timeit(
            lambda: k.trace_and_update(q, e, mu, mu_a, -0.5, -1.0, 0.99, 0.8, 0.005),
            repeat * 10),
        "replay_accumulate(B=32,L=10)": timeit(
            lambda: k.replay_accumulate(q, rowmax, states, actions, rewards,
                                        next_states, *sl, *al, 0.99, 0.8, acc),
            max(repeat // 5, 2)),
    }

    def episode():
        env = CartPoleEnv(rng=np.random.default_rng(1))
        agent = make_agent("enhanced-fql", sp, ap, AgentConfig().validate(),
                           np.random.default_rng(2), backend=k)
        run_episode(agent, env, 500)

    times["train_episode(500 steps)"] = timeit(episode, max(repeat // 10, 2), warmup=1)
    return times


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    names = kernels.available_backends()
    if "compiled" not in names:
        print("compiled extension not built; benchmarking pure backend only")
    results = {name: bench_backend(name, args.repeat) for name in names}

    ops = list(next(iter(results.values())))
    width = max(len(op) for op in ops)
    header = f"{'operation':<{width}}" + "".join(f"  {n:>12}" for n in names)
    if len(names) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for op in ops:
        row = f"{op:<{width}}"
        for name in names:
            row += f"  {results[name][op] * 1e6:>10.1f}us"
        if len(names) == 2:
            row += f"  {results['pure'][op] / results['compiled'][op]:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
