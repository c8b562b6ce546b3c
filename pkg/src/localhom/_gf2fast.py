"""Packed-bitset GF(2) column reduction (numba-compiled hot path).

Same algorithm as fieldla.reduce_columns for q = 2 — left-to-right lowest-one
elimination — on columns stored as uint64 word arrays, so large boundary
matrices reduce without per-column Python overhead.  Falls back silently when
numba is unavailable (AVAILABLE = False).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:          # pragma: no cover - numba is a declared dependency
    AVAILABLE = False

    def njit(*a, **k):
        def deco(fn):
            return fn
        return deco


@njit(cache=True)
def _msb(x):
    """Index of the highest set bit of a nonzero uint64."""
    r = 0
    x = np.uint64(x)
    if x >> np.uint64(32):
        r += 32
        x >>= np.uint64(32)
    if x >> np.uint64(16):
        r += 16
        x >>= np.uint64(16)
    if x >> np.uint64(8):
        r += 8
        x >>= np.uint64(8)
    if x >> np.uint64(4):
        r += 4
        x >>= np.uint64(4)
    if x >> np.uint64(2):
        r += 2
        x >>= np.uint64(2)
    if x >> np.uint64(1):
        r += 1
    return r


@njit(cache=True)
def pack_rows(rows, nwords):
    """rows: (ncol, width) int64 row indices, -1 = absent.  Returns the
    (ncol, nwords) uint64 bit-columns (entries toggle, mod-2 safe)."""
    ncol = rows.shape[0]
    width = rows.shape[1]
    out = np.zeros((ncol, nwords), dtype=np.uint64)
    for c in range(ncol):
        for k in range(width):
            r = rows[c, k]
            if r >= 0:
                out[c, r >> 6] ^= np.uint64(1) << np.uint64(r & 63)
    return out


@njit(cache=True)
def reduce_packed(cols, nrows):
    """In-place lowest-one reduction; returns the per-column pivot rows
    (-1 for columns that reduce to zero)."""
    ncol, nwords = cols.shape
    pivot = np.full(nrows + 1, -1, dtype=np.int64)
    lows = np.empty(ncol, dtype=np.int64)
    for j in range(ncol):
        low = -1
        for w in range(nwords - 1, -1, -1):
            if cols[j, w]:
                low = (w << 6) + _msb(cols[j, w])
                break
        while low >= 0 and pivot[low] >= 0:
            k = pivot[low]
            top = low >> 6
            for w in range(top + 1):
                cols[j, w] ^= cols[k, w]
            low = -1
            for w in range(top, -1, -1):
                if cols[j, w]:
                    low = (w << 6) + _msb(cols[j, w])
                    break
        if low >= 0:
            pivot[low] = j
        lows[j] = low
    return lows


def int_to_words(x: int, nwords: int) -> np.ndarray:
    """A Python-int bitmask column as a uint64 word vector."""
    return np.frombuffer(int(x).to_bytes(nwords * 8, "little"),
                         dtype=np.uint64).copy()
