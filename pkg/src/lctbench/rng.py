"""Vectorised Philox4x32-10 counter-based generator.

A draw is a pure function of ``(seed, sample index, slot)``, so any split of the
index range across threads or chunks reproduces the same numbers.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)


def philox4x32(counter, key, rounds: int = 10):
    """Apply Philox4x32 to arrays of counters.

    ``counter`` is a sequence of four uint32 arrays (or scalars) of a common
    broadcast shape, ``key`` a pair of ints.  Returns four uint64 arrays holding
    32-bit outputs.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in counter)
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    for _ in range(rounds):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _SHIFT, p0 & _MASK
        hi1, lo1 = p1 >> _SHIFT, p1 & _MASK
        c0, c1, c2, c3 = (hi1 ^ c1 ^ np.uint64(k0), lo1, hi0 ^ c3 ^ np.uint64(k1), lo0)
        k0 = (k0 + _W0) & 0xFFFFFFFF
        k1 = (k1 + _W1) & 0xFFFFFFFF
    return c0, c1, c2, c3


def uniforms(seed: int, start: int, count: int, slots: int, stream: int = 0) -> np.ndarray:
    """Doubles in the open interval (0, 1), shape ``(count, slots)``.

    Row ``i`` depends only on ``(seed, start + i, stream)``.
    """
    if seed < 0 or seed >= 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    idx = np.arange(start, start + count, dtype=np.uint64)
    lo, hi = idx & _MASK, idx >> _SHIFT
    key = (seed & 0xFFFFFFFF, seed >> 32)
    blocks = (slots + 1) // 2
    out = np.empty((count, 2 * blocks))
    for b in range(blocks):
        x0, x1, x2, x3 = philox4x32((lo, hi, np.uint64(b), np.uint64(stream)), key)
        out[:, 2 * b] = _to_unit(x0, x1)
        out[:, 2 * b + 1] = _to_unit(x2, x3)
    return out[:, :slots]


def _to_unit(a, b) -> np.ndarray:
    # 53 random bits, centred in their ulp so 0 and 1 never occur
    bits = ((a >> np.uint64(5)) << np.uint64(26)) | (b >> np.uint64(6))
    return (bits.astype(np.float64) + 0.5) * 2.0 ** -53
