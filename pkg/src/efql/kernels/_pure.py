"""NumPy reference backend; signature-compatible twin of the compiled core.

Every function here matches `_core` entry for entry (same clamping, same
association order in products) so the two backends agree to floating-point
round-off and either can drive the agents.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def joint_membership(centers, offsets, inv2s2, lo, hi, s, out, work):
    """Joint rule memberships of state s written into out (row-major order)."""
    d0 = min(max(float(s[0]), lo[0]), hi[0]) - centers[offsets[0]:offsets[1]]
    mu = np.exp(-d0 * d0 * inv2s2[0])
    for d in range(1, lo.shape[0]):
        x = min(max(float(s[d]), lo[d]), hi[d])
        dd = x - centers[offsets[d]:offsets[d + 1]]
        mu = np.multiply.outer(mu, np.exp(-dd * dd * inv2s2[d]))
    out[:] = mu.ravel()


def action_membership(centers, inv2s2, lo, hi, a, out):
    """Action-set memberships of action a written into out."""
    d = min(max(float(a), lo), hi) - centers
    np.exp(-d * d * inv2s2, out=out)


def upsilon(q, mu):
    """Weighted best-entry value from raw (unnormalized) memberships."""
    return float((mu @ q.max(axis=1)) / mu.sum())


def bilinear_value(q, mu_s, mu_a):
    """Doubly weighted table value from raw state and action memberships."""
    return float((mu_s @ q @ mu_a) / (mu_s.sum() * mu_a.sum()))


def greedy_action(q, mu, beta, a_centers, scores, jstar):
    """Defuzzified greedy action from raw state memberships.

    SoftMax over w_i * rowmax_i / beta with max-subtraction; each rule
    contributes its argmax column's action center, ties to the lowest index.
    """
    w = mu / mu.sum()
    jstar[:] = np.argmax(q, axis=1)
    scores[:] = w * q.max(axis=1) / beta
    z = np.exp(scores - scores.max())
    return float((z @ a_centers[jstar]) / z.sum())


def trace_and_update(q, e, mu_s, mu_a, r, ups_next, gamma, lam, alpha):
    """Fused trace decay + clamp and trace-weighted table update, in place.

    e <- min(gamma*lam*e + outer(mu_s, mu_a), 1)
    q <- q + alpha * e * (r + gamma*ups_next - q)

    Returns False if the table picked up non-finite entries.
    """
    target = r + gamma * ups_next
    e *= gamma * lam
    e += np.multiply.outer(mu_s, mu_a)
    np.minimum(e, 1.0, out=e)
    q += alpha * e * (target - q)
    return bool(np.isfinite(q.sum()))


def scaled_activation_update(q, mu_s, mu_a, g, alpha):
    """q <- q + alpha * outer(mu_s, mu_a) * (g - q), in place."""
    q += alpha * np.multiply.outer(mu_s, mu_a) * (g - q)
    return bool(np.isfinite(q.sum()))


def replay_accumulate(qf, rowmax, states, actions, rewards, next_states,
                      centers, offsets, inv2s2, lo, hi,
                      a_centers, a_inv2s2, a_lo, a_hi,
                      gamma, lam, acc):
    """Accumulate sum_b sum_l delta .* E over a batch against the frozen table.

    Traces are rebuilt from zero inside every segment; delta uses the frozen
    table qf and its precomputed row maxima. Returns the mean |delta| over
    all batch entries.
    """
    n_batch, seg_len, _ = states.shape
    rules, acts = qf.shape
    e = np.zeros((rules, acts))
    mu_s = np.empty(rules)
    mu_n = np.empty(rules)
    mu_a = np.empty(acts)
    gl = gamma * lam
    abs_sum = 0.0
    for b in range(n_batch):
        e.fill(0.0)
        for l in range(seg_len):
            joint_membership(centers, offsets, inv2s2, lo, hi, states[b, l], mu_s, None)
            action_membership(a_centers, a_inv2s2, a_lo, a_hi, actions[b, l], mu_a)
            joint_membership(centers, offsets, inv2s2, lo, hi, next_states[b, l], mu_n, None)
            target = rewards[b, l] + gamma * ((mu_n @ rowmax) / mu_n.sum())
            e *= gl
            e += np.multiply.outer(mu_s, mu_a)
            np.minimum(e, 1.0, out=e)
            delta = target - qf
            acc += delta * e
            abs_sum += np.abs(delta).sum()
    return abs_sum / (n_batch * seg_len * rules * acts)
