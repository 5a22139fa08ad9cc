"""Reference kernels in numpy, used when the compiled extension is unavailable.

Both backends evaluate a truncated group-law polynomial on a batch of pairs
in (O_K / p^n)^d.  Elements are int64 arrays of shape (B, d, m) holding
tower coordinates; ``T`` is the (m, m, m) structure tensor reduced mod
``mod``.  Each term k contributes ``c[k] * x^ex[k] * y^ey[k]`` to output
coordinate ``out[k]``.  ``mod`` must stay below 2**31 so that a product of
two residues fits in int64.
"""

import numpy as np


def ring_mul_batch(X, Y, T, mod):
    """Coordinatewise product of two (B, m) batches of ring elements."""
    B, m = X.shape
    if m == 1:
        return (X * Y) % mod
    out = np.zeros((B, m), dtype=np.int64)
    for a in range(m):
        xa = X[:, a]
        for b in range(m):
            t = T[a, b]
            nz = np.nonzero(t)[0]
            if nz.size == 0:
                continue
            v = (xa * Y[:, b]) % mod
            for c in nz:
                out[:, c] = (out[:, c] + v * t[c]) % mod
    return out


def _powers(X, T, mod, maxdeg):
    # pw[i][k] is x_i^k as a (B, m) batch
    B, d, m = X.shape
    one = np.zeros((B, m), dtype=np.int64)
    one[:, 0] = 1 % mod
    pw = []
    for i in range(d):
        row = [one, X[:, i, :] % mod]
        for _ in range(2, maxdeg + 1):
            row.append(ring_mul_batch(row[-1], row[1], T, mod))
        pw.append(row)
    return pw


def law_mul_batch(X, Y, T, mod, tout, tex, tey, tc, maxdeg):
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    B, d, m = X.shape
    px = _powers(X, T, mod, maxdeg)
    py = _powers(Y, T, mod, maxdeg)
    Z = np.zeros((B, d, m), dtype=np.int64)
    for k in range(len(tout)):
        mono = np.broadcast_to(tc[k] % mod, (B, m)).copy()
        for i in range(d):
            if tex[k, i]:
                mono = ring_mul_batch(mono, px[i][tex[k, i]], T, mod)
            if tey[k, i]:
                mono = ring_mul_batch(mono, py[i][tey[k, i]], T, mod)
        r = tout[k]
        Z[:, r, :] = (Z[:, r, :] + mono) % mod
    return Z
