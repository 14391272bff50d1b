"""Numpy fallback for the butterfly kernels.

Both functions operate in place on C-contiguous ``(batch, M)`` arrays and
transform along the last axis. Stage ``s`` (1-based) pairs elements ``h``
apart with ``h = M >> s``, i.e. decimation in frequency.
"""
import numpy as np

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def fht_real_batch(x, m):
    batch = x.shape[0]
    for s in range(1, m + 1):
        h = 1 << (m - s)
        v = x.reshape(batch, -1, 2, h)
        a = v[:, :, 0, :].copy()
        b = v[:, :, 1, :]
        v[:, :, 0, :] += b
        v[:, :, 1, :] = a - b
        v *= INV_SQRT2
    return x


def _halve_round_away(t):
    # exact integer round-half-away-from-zero of t / 2
    return np.sign(t) * ((np.abs(t) + 1) >> 1)


def fht_fixed_batch(x, m):
    batch = x.shape[0]
    for s in range(1, m + 1):
        h = 1 << (m - s)
        v = x.reshape(batch, -1, 2, h)
        a = v[:, :, 0, :].copy()
        b = v[:, :, 1, :].copy()
        if s % 2:
            v[:, :, 0, :] = a + b
            v[:, :, 1, :] = a - b
        else:
            v[:, :, 0, :] = _halve_round_away(a + b)
            v[:, :, 1, :] = _halve_round_away(a - b)
    return x
