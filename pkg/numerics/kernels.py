"""
Compiled boundary-crossing recursions for sorted uniforms.

All kernels share one update: given the row c^(k-1) on a window of counts,
c_j^(k) = sum_m c_m^(k-1) * P(Binomial(n - m, p_k) = j - m). Every kernel
returns the number of multiply-adds it performed.
"""
import math

import numba
import numpy as np

# below this a running pmf term is recomputed from logs instead of by ratio
_RATIO_FLOOR = 1e-280


@numba.njit(cache=True, nogil=True)
def _log_pmf(lf, k, size, p):
    if p <= 0.0:
        return 0.0 if k == 0 else -np.inf
    if p >= 1.0:
        return 0.0 if k == size else -np.inf
    return lf[size] - lf[k] - lf[size - k] + k * math.log(p) + (size - k) * math.log1p(-p)


@numba.njit(cache=True, nogil=True)
def _bin_probability(lo, hi):
    """Conditional probability of landing in (lo, hi] given a point is above lo."""
    if hi <= lo or lo >= 1.0:
        return 0.0
    p = (hi - lo) / (1.0 - lo)
    if p > 1.0:
        return 1.0
    return p


@numba.njit(cache=True, nogil=True)
def _advance(prev, cur, lf, n, p, m_lo, m_hi, j_lo, j_hi):
    for j in range(j_lo, j_hi + 1):
        cur[j] = 0.0
    steps = 0
    if m_lo > m_hi or j_lo > j_hi:
        return steps

    if p <= 0.0:
        # zero-width bin: counts carry over unchanged
        for j in range(max(j_lo, m_lo), min(j_hi, m_hi) + 1):
            cur[j] = prev[j]
            steps += 1
        return steps

    if p >= 1.0:
        # every remaining point lands in this bin
        if j_lo <= n <= j_hi:
            total = 0.0
            for m in range(m_lo, m_hi + 1):
                total += prev[m]
                steps += 1
            cur[n] = total
        return steps

    ratio = p / (1.0 - p)
    for m in range(m_lo, m_hi + 1):
        c = prev[m]
        if c == 0.0:
            continue
        size = n - m
        d0 = max(j_lo, m) - m
        d1 = min(j_hi, n) - m
        if d0 > d1:
            continue
        t = math.exp(_log_pmf(lf, d0, size, p))
        for d in range(d0, d1 + 1):
            cur[m + d] += c * t
            steps += 1
            if d < d1:
                if t > _RATIO_FLOOR:
                    t *= (size - d) / (d + 1.0) * ratio
                else:
                    t = math.exp(_log_pmf(lf, d + 1, size, p))
    return steps


@numba.njit(cache=True, nogil=True)
def _first_row(row, lf, n, b1, j_lo, j_hi):
    for j in range(j_lo, j_hi + 1):
        row[j] = math.exp(_log_pmf(lf, j, n, b1))


@numba.njit(cache=True, nogil=True)
def two_sided_noncrossing(b, lower, upper, lf, n):
    """P(l_k <= S_k <= u_k for k = 1..2n) by the full forward recursion.

    b holds b_0..b_{2n+1}; lower/upper hold l_k, u_k at indices 1..2n.
    Also returns the last rolling row c^(2n).
    """
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    if lower[1] > upper[1]:
        return 0.0, 0, prev
    _first_row(prev, lf, n, b[1], lower[1], upper[1])
    steps = 0
    for k in range(2, 2 * n + 1):
        if lower[k] > upper[k]:
            return 0.0, steps, prev
        p = _bin_probability(b[k - 1], b[k])
        steps += _advance(prev, cur, lf, n, p, lower[k - 1], upper[k - 1], lower[k], upper[k])
        prev, cur = cur, prev
    return prev[n], steps, prev


@numba.njit(cache=True, nogil=True)
def two_sided_noncrossing_half(b, lower, upper, lf, n):
    """Same probability from rows n and n+1 only, valid for ELL-symmetric bounds."""
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    if lower[1] > upper[1]:
        return 0.0, 0
    _first_row(prev, lf, n, b[1], lower[1], upper[1])
    steps = 0
    for k in range(2, n + 1):
        if lower[k] > upper[k]:
            return 0.0, steps
        p = _bin_probability(b[k - 1], b[k])
        steps += _advance(prev, cur, lf, n, p, lower[k - 1], upper[k - 1], lower[k], upper[k])
        prev, cur = cur, prev
    row_n = prev.copy()

    # row n+1 is read at n - j for every admissible j of row n
    j_lo = min(lower[n + 1], n - upper[n])
    j_hi = max(upper[n + 1], n - lower[n])
    p = _bin_probability(b[n], b[n + 1])
    steps += _advance(row_n, cur, lf, n, p, lower[n], upper[n], j_lo, j_hi)

    total = 0.0
    for j in range(lower[n], upper[n] + 1):
        a = row_n[j]
        c = cur[n - j]
        if a <= 0.0 or c <= 0.0:
            continue
        total += math.exp(math.log(a) + math.log(c) - _log_pmf(lf, j, n, b[n]))
        steps += 1
    return total, steps


@numba.njit(cache=True, nogil=True)
def one_sided_noncrossing(h, lf, n, approx, first_check, check_interval, max_rel_err):
    """P(S_k <= k - 1 for k = 1..n) for lower bounds h_1..h_n (h[0] = 0).

    With approx set, leading terms are dropped at checkpoints while the
    accumulated error bound keeps the relative error in 1 - P below
    max_rel_err. Returns (probability, steps, error bound, skip, drop ks, drop Ts,
    drops, last row).
    """
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    drop_k = np.zeros(n + 1, dtype=np.int64)
    drop_t = np.zeros(n + 1, dtype=np.int64)
    drops = 0
    err_bound = 0.0
    skip = -1
    steps = 0

    prev[0] = math.exp(_log_pmf(lf, 0, n, h[1]))
    for k in range(2, n + 1):
        p = _bin_probability(h[k - 1], h[k])
        steps += _advance(prev, cur, lf, n, p, skip + 1, k - 2, skip + 1, k - 1)
        prev, cur = cur, prev

        checkpoint = (k > first_check and k % check_interval == 0) or k == first_check
        if approx and checkpoint and k < n:
            retained = 0.0
            for j in range(skip + 1, k):
                retained += prev[j]
            available = max_rel_err - (1.0 + max_rel_err) * err_bound
            available -= max_rel_err * retained
            t = skip
            dropped = 0.0
            while t + 1 <= k - 1 and dropped + prev[t + 1] <= available:
                t += 1
                dropped += prev[t]
            if t > skip:
                err_bound += dropped
                skip = t
                drop_k[drops] = k
                drop_t[drops] = t
                drops += 1

    # the last bin takes every remaining point, so c_n^(n+1) is the row sum
    total = 0.0
    for m in range(skip + 1, n):
        total += prev[m]
    return total, steps, err_bound, skip, drop_k, drop_t, drops, prev
