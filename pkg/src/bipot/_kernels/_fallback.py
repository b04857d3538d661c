"""Pure numpy/Python kernels, bit-compatible with the compiled extension.

Every function here mirrors one in ``_ext.pyx`` and must produce identical
bytes for identical inputs, so the two backends stay interchangeable. The
sliding filters are vectorized block decompositions; the Legendre transform
is a per-row Python loop (hull + monotone pointer), fast enough at the grid
sizes this package targets.
"""

from __future__ import annotations

import math

import numpy as np

_INF = math.inf


def lf_transform(xs, vals, ys, out=None):
    """Row-wise discrete Legendre transform.

    out[b, j] = max_i (xs[i] * ys[j] - vals[b, i]) over finite vals[b, i],
    computed on the lower convex hull of the finite graph points with a
    pointer that only advances (the maximizer index is nondecreasing in y).
    Rows with empty domain are filled with -inf. Candidate values are
    evaluated exactly as ``fl(fl(x * y) - v)``, matching the brute-force
    definition bit for bit.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    B, n = vals.shape
    m = ys.shape[0]
    if out is None:
        out = np.empty((B, m), dtype=np.float64)
    x = xs.tolist()
    yy = ys.tolist()
    for b in range(B):
        v = vals[b].tolist()
        hull = []
        for i in range(n):
            vi = v[i]
            if vi == _INF:
                continue
            while len(hull) >= 2:
                i1 = hull[-2]
                i2 = hull[-1]
                cross = (x[i2] - x[i1]) * (vi - v[i1]) \
                    - (x[i] - x[i1]) * (v[i2] - v[i1])
                if cross <= 0.0:
                    hull.pop()
                else:
                    break
            hull.append(i)
        if not hull:
            out[b, :] = -_INF
            continue
        row = out[b]
        p = 0
        k = len(hull)
        for j in range(m):
            y = yy[j]
            t = x[hull[p]] * y - v[hull[p]]
            while p + 1 < k:
                t2 = x[hull[p + 1]] * y - v[hull[p + 1]]
                if t2 >= t:
                    p += 1
                    t = t2
                else:
                    break
            row[j] = t
    return out


def _padded_blocks(a, w, fill):
    B, n = a.shape
    W = 2 * w + 1
    L = n + 2 * w
    nblocks = -(-L // W)
    padded = np.full((B, nblocks * W), fill, dtype=a.dtype)
    padded[:, w:w + n] = a
    return padded.reshape(B, nblocks, W), L, W


def sliding_min(a, w, out=None):
    """out[b, i] = min(a[b, max(0, i-w) : i+w+1]) for half-width w >= 0."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    w = int(w)
    if out is None:
        out = np.empty_like(a)
    if w <= 0:
        out[...] = a
        return out
    blocks, L, W = _padded_blocks(a, w, _INF)
    pre = np.minimum.accumulate(blocks, axis=2).reshape(a.shape[0], -1)
    suf = np.minimum.accumulate(blocks[:, :, ::-1], axis=2)[:, :, ::-1]
    suf = suf.reshape(a.shape[0], -1)
    np.minimum(suf[:, :L - W + 1], pre[:, W - 1:L], out=out)
    return out


def sliding_max_u8(a, w, out=None):
    """Same window as sliding_min, max over uint8 (mask dilation)."""
    a = np.ascontiguousarray(a, dtype=np.uint8)
    w = int(w)
    if out is None:
        out = np.empty_like(a)
    if w <= 0:
        out[...] = a
        return out
    blocks, L, W = _padded_blocks(a, w, 0)
    pre = np.maximum.accumulate(blocks, axis=2).reshape(a.shape[0], -1)
    suf = np.maximum.accumulate(blocks[:, :, ::-1], axis=2)[:, :, ::-1]
    suf = suf.reshape(a.shape[0], -1)
    np.maximum(suf[:, :L - W + 1], pre[:, W - 1:L], out=out)
    return out
