"""Row reduction over GF(p) for small integer matrices."""
from __future__ import annotations

import numpy as np


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(mat: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {v : mat @ v = 0 (mod p)}."""
    a, pivots = rref(mat, p)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-a[row, f]) % p
        basis.append(v)
    return basis


def solve(mat: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of mat @ v = rhs (mod p), or None."""
    mat = np.asarray(mat, dtype=np.int64)
    aug = np.concatenate([mat, np.asarray(rhs, dtype=np.int64).reshape(-1, 1)], axis=1)
    a, pivots = rref(aug, p)
    cols = mat.shape[1]
    if cols in pivots:
        return None
    v = np.zeros(cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        v[pc] = a[row, cols]
    return v
