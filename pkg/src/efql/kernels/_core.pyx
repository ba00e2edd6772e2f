# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot-path kernels; see `_pure` for the NumPy reference twin."""

from libc.math cimport exp, fabs, isfinite

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "compiled"


cdef inline double _clamp(double x, double lo, double hi) noexcept nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cpdef void joint_membership(double[::1] centers, cnp.int64_t[::1] offsets,
                            double[::1] inv2s2, double[::1] lo, double[::1] hi,
                            double[::1] s, double[::1] out, double[::1] work):
    """Joint rule memberships of state s written into out (row-major order)."""
    cdef Py_ssize_t ndim = lo.shape[0]
    cdef Py_ssize_t d, j, i, n, base, size
    cdef double x, diff, m
    for d in range(ndim):
        x = _clamp(s[d], lo[d], hi[d])
        for j in range(offsets[d], offsets[d + 1]):
            diff = x - centers[j]
            work[j] = exp(-diff * diff * inv2s2[d])
    # in-place Kronecker expansion, last dimension varying fastest
    size = 1
    out[0] = 1.0
    for d in range(ndim):
        base = offsets[d]
        n = offsets[d + 1] - offsets[d]
        for i in range(size - 1, -1, -1):
            m = out[i]
            for j in range(n - 1, -1, -1):
                out[i * n + j] = m * work[base + j]
        size *= n


cpdef void action_membership(double[::1] centers, double inv2s2, double lo, double hi,
                             double a, double[::1] out):
    """Action-set memberships of action a written into out."""
    cdef double x = _clamp(a, lo, hi)
    cdef double diff
    cdef Py_ssize_t j
    for j in range(centers.shape[0]):
        diff = x - centers[j]
        out[j] = exp(-diff * diff * inv2s2)


cpdef double upsilon(double[:, ::1] q, double[::1] mu):
    """Weighted best-entry value from raw (unnormalized) memberships."""
    cdef Py_ssize_t rules = q.shape[0], acts = q.shape[1], i, j
    cdef double rm, v, acc = 0.0, msum = 0.0
    for i in range(rules):
        rm = q[i, 0]
        for j in range(1, acts):
            v = q[i, j]
            if v > rm:
                rm = v
        acc += mu[i] * rm
        msum += mu[i]
    return acc / msum


cpdef double bilinear_value(double[:, ::1] q, double[::1] mu_s, double[::1] mu_a):
    """Doubly weighted table value from raw state and action memberships."""
    cdef Py_ssize_t rules = q.shape[0], acts = q.shape[1], i, j
    cdef double tot = 0.0, ssum = 0.0, asum = 0.0, rowdot
    for j in range(acts):
        asum += mu_a[j]
    for i in range(rules):
        rowdot = 0.0
        for j in range(acts):
            rowdot += q[i, j] * mu_a[j]
        tot += mu_s[i] * rowdot
        ssum += mu_s[i]
    return tot / (ssum * asum)


cpdef double greedy_action(double[:, ::1] q, double[::1] mu, double beta,
                           double[::1] a_centers, double[::1] scores,
                           cnp.int64_t[::1] jstar):
    """Defuzzified greedy action from raw state memberships.

    SoftMax over w_i * rowmax_i / beta with max-subtraction; each rule
    contributes its argmax column's action center, ties to the lowest index.
    """
    cdef Py_ssize_t rules = q.shape[0], acts = q.shape[1], i, j, jj
    cdef double msum = 0.0, rm, v, smax, z, zsum = 0.0, asum = 0.0
    for i in range(rules):
        msum += mu[i]
    for i in range(rules):
        rm = q[i, 0]
        jj = 0
        for j in range(1, acts):
            v = q[i, j]
            if v > rm:
                rm = v
                jj = j
        jstar[i] = jj
        scores[i] = (mu[i] / msum) * rm / beta
    smax = scores[0]
    for i in range(1, rules):
        if scores[i] > smax:
            smax = scores[i]
    for i in range(rules):
        z = exp(scores[i] - smax)
        zsum += z
        asum += z * a_centers[jstar[i]]
    return asum / zsum


cpdef bint trace_and_update(double[:, ::1] q, double[:, ::1] e,
                            double[::1] mu_s, double[::1] mu_a,
                            double r, double ups_next, double gamma, double lam,
                            double alpha):
    """Fused trace decay + clamp and trace-weighted table update, in place.

    e <- min(gamma*lam*e + outer(mu_s, mu_a), 1)
    q <- q + alpha * e * (r + gamma*ups_next - q)

    Returns False if the table picked up non-finite entries.
    """
    cdef Py_ssize_t rules = q.shape[0], acts = q.shape[1], i, j
    cdef double gl = gamma * lam, target = r + gamma * ups_next
    cdef double ms, en, qv
    cdef bint ok = True
    for i in range(rules):
        ms = mu_s[i]
        for j in range(acts):
            en = gl * e[i, j] + ms * mu_a[j]
            if en > 1.0:
                en = 1.0
            e[i, j] = en
            qv = q[i, j]
            qv = qv + alpha * en * (target - qv)
            if not isfinite(qv):
                ok = False
            q[i, j] = qv
    return ok


cpdef bint scaled_activation_update(double[:, ::1] q, double[::1] mu_s,
                                    double[::1] mu_a, double g, double alpha):
    """q <- q + alpha * outer(mu_s, mu_a) * (g - q), in place."""
    cdef Py_ssize_t rules = q.shape[0], acts = q.shape[1], i, j
    cdef double ms, qv
    cdef bint ok = True
    for i in range(rules):
        ms = mu_s[i]
        for j in range(acts):
            qv = q[i, j]
            qv = qv + alpha * ms * mu_a[j] * (g - qv)
            if not isfinite(qv):
                ok = False
            q[i, j] = qv
    return ok


cpdef double replay_accumulate(double[:, ::1] qf, double[::1] rowmax,
                               double[:, :, ::1] states, double[:, ::1] actions,
                               double[:, ::1] rewards, double[:, :, ::1] next_states,
                               double[::1] centers, cnp.int64_t[::1] offsets,
                               double[::1] inv2s2, double[::1] lo, double[::1] hi,
                               double[::1] a_centers, double a_inv2s2,
                               double a_lo, double a_hi,
                               double gamma, double lam, double[:, ::1] acc):
    """Accumulate sum_b sum_l delta .* E over a batch against the frozen table.

    Traces are rebuilt from zero inside every segment; delta uses the frozen
    table qf and its precomputed row maxima. Returns the mean |delta| over
    all batch entries.
    """
    cdef Py_ssize_t n_batch = states.shape[0], seg_len = states.shape[1]
    cdef Py_ssize_t rules = qf.shape[0], acts = qf.shape[1]
    cdef Py_ssize_t b, l, i, j
    cdef double gl = gamma * lam
    cdef double ups, msum, target, ms, en, d, abs_sum = 0.0

    e_arr = np.zeros((rules, acts))
    mu_s_arr = np.empty(rules)
    mu_n_arr = np.empty(rules)
    mu_a_arr = np.empty(acts)
    work_arr = np.empty(centers.shape[0])
    cdef double[:, ::1] e = e_arr
    cdef double[::1] mu_s = mu_s_arr
    cdef double[::1] mu_n = mu_n_arr
    cdef double[::1] mu_a = mu_a_arr
    cdef double[::1] work = work_arr

    for b in range(n_batch):
        for i in range(rules):
            for j in range(acts):
                e[i, j] = 0.0
        for l in range(seg_len):
            joint_membership(centers, offsets, inv2s2, lo, hi,
                             states[b, l], mu_s, work)
            action_membership(a_centers, a_inv2s2, a_lo, a_hi,
                              actions[b, l], mu_a)
            joint_membership(centers, offsets, inv2s2, lo, hi,
                             next_states[b, l], mu_n, work)
            ups = 0.0
            msum = 0.0
            for i in range(rules):
                ups += mu_n[i] * rowmax[i]
                msum += mu_n[i]
            ups /= msum
            target = rewards[b, l] + gamma * ups
            for i in range(rules):
                ms = mu_s[i]
                for j in range(acts):
                    en = gl * e[i, j] + ms * mu_a[j]
                    if en > 1.0:
                        en = 1.0
                    e[i, j] = en
                    d = target - qf[i, j]
                    acc[i, j] += d * en
                    abs_sum += fabs(d)
    return abs_sum / (n_batch * seg_len * rules * acts)
