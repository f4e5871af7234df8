"""Lag-model rollout, written loop-style so numba can compile it as-is.

``numpy_impl`` uses this function directly; ``numba_impl`` wraps it in
``njit``. History shifts run with descending indices on purpose: slice
assignment over overlapping memory is not safe under numba.
"""

import numpy as np


def narx_step(hist_y, hist_u, u_new_dev, na, nb, has_bias, coef,
              clamp_lo, clamp_hi, prod_i, prod_j):
    """One lag-model step; mutates the history windows in place.

    u_new_dev holds the per-channel input deviations applied over the
    step. Returns the new output deviation (may be non-finite; the
    caller decides how to fail).
    """
    n_ch = hist_u.shape[0]
    B = na + int(nb.sum())
    base = np.empty(B)
    for c in range(n_ch):
        m = int(nb[c])
        for q in range(m - 1, 0, -1):
            hist_u[c, q] = hist_u[c, q - 1]
        if m > 0:
            hist_u[c, 0] = u_new_dev[c]
    for q in range(na):
        base[q] = hist_y[q]
    off = na
    for c in range(n_ch):
        for q in range(int(nb[c])):
            base[off + q] = hist_u[c, q]
        off += int(nb[c])
    pos = 0
    acc = 0.0
    if has_bias:
        acc += coef[0]
        pos = 1
    for jf in range(B):
        v = base[jf]
        lo = clamp_lo[pos]
        hi = clamp_hi[pos]
        acc += coef[pos] * (lo if v < lo else hi if v > hi else v)
        pos += 1
    for m in range(prod_i.shape[0]):
        v = base[prod_i[m]] * base[prod_j[m]]
        lo = clamp_lo[pos]
        hi = clamp_hi[pos]
        acc += coef[pos] * (lo if v < lo else hi if v > hi else v)
        pos += 1
    for q in range(na - 1, 0, -1):
        hist_y[q] = hist_y[q - 1]
    if na > 0:
        hist_y[0] = acc
    return acc


def narx_rollout(y0_dev, u_dev, na, nb, has_bias, coef, clamp_lo, clamp_hi,
                 prod_i, prod_j):
    """Roll a (quadratic) lag model over an input sequence.

    y0_dev      initial output deviation from the operating point
    u_dev       (n_channels, n_steps) input deviations
    na, nb      output lag count / per-channel input lag counts (int64 array)
    has_bias    whether coef[0] is a constant offset
    coef        [bias?] + base-lag + product-feature coefficients
    clamp_lo/hi per-feature clamps aligned with coef (+-inf disables)
    prod_i/j    base-vector index pairs of the product features (int64)

    Returns (y_dev, n_valid); n_valid < n_steps marks divergence at that
    step. Lag windows warm-start from the quiescent operating point.
    """
    n_ch, n_steps = u_dev.shape
    B = na + int(nb.sum())
    n_prod = prod_i.shape[0]
    y = np.empty(n_steps)
    y[0] = y0_dev
    hist_y = np.full(na, y0_dev)
    max_nb = 1
    for c in range(n_ch):
        if nb[c] > max_nb:
            max_nb = int(nb[c])
    hist_u = np.zeros((n_ch, max_nb))

    base = np.empty(B)
    for k in range(1, n_steps):
        for c in range(n_ch):
            m = int(nb[c])
            for q in range(m - 1, 0, -1):
                hist_u[c, q] = hist_u[c, q - 1]
            if m > 0:
                hist_u[c, 0] = u_dev[c, k - 1]
        for q in range(na):
            base[q] = hist_y[q]
        off = na
        for c in range(n_ch):
            for q in range(int(nb[c])):
                base[off + q] = hist_u[c, q]
            off += int(nb[c])
        pos = 0
        acc = 0.0
        if has_bias:
            acc += coef[0]
            pos = 1
        for jf in range(B):
            v = base[jf]
            lo = clamp_lo[pos]
            hi = clamp_hi[pos]
            acc += coef[pos] * (lo if v < lo else hi if v > hi else v)
            pos += 1
        for m in range(n_prod):
            v = base[prod_i[m]] * base[prod_j[m]]
            lo = clamp_lo[pos]
            hi = clamp_hi[pos]
            acc += coef[pos] * (lo if v < lo else hi if v > hi else v)
            pos += 1
        if not np.isfinite(acc):
            return y, k
        y[k] = acc
        for q in range(na - 1, 0, -1):
            hist_y[q] = hist_y[q - 1]
        if na > 0:
            hist_y[0] = acc
    return y, n_steps
