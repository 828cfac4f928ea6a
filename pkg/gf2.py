"""
Binary linear algebra helpers (generator / parity-check matrices, bit packing).

Matrices are numpy uint8 arrays holding 0/1; every result is reduced mod 2.
"""

import numpy as np


def as_bits(matrix) -> np.ndarray:
    return np.asarray(matrix, dtype=np.uint8) & 1


def rref(matrix):
    """
    Reduced row echelon form over GF(2).
    Returns (reduced matrix without zero rows, list of pivot columns).
    """
    m = as_bits(matrix).copy()
    if m.ndim != 2:
        raise ValueError("rref expects a 2-D matrix")
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.nonzero(m[r:, c])[0]
        if candidates.size == 0:
            continue
        p = r + candidates[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hits = np.nonzero(m[:, c])[0]
        hits = hits[hits != r]
        m[hits] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix) -> np.ndarray:
    """Basis (as rows) of {x : matrix · xᵀ = 0}, returned in reduced row echelon form."""
    m = as_bits(matrix)
    cols = m.shape[1]
    reduced, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = reduced[r, f]
    if basis.shape[0] == 0:
        return basis
    return rref(basis)[0]


def inverse(square) -> np.ndarray:
    a = as_bits(square)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    augmented = np.concatenate([a, np.eye(n, dtype=np.uint8)], axis=1)
    reduced, pivots = rref(augmented)
    if pivots[:n] != list(range(n)) or reduced.shape[0] < n:
        raise ValueError("matrix is singular over GF(2)")
    return reduced[:n, n:]


def right_inverse(generator) -> np.ndarray:
    """
    R (n x k) with generator · R = I_k, built on the pivot columns of the generator.
    For a codeword c = m · generator, c · R recovers m.
    """
    g = as_bits(generator)
    k, n = g.shape
    _, pivots = rref(g)
    if len(pivots) != k:
        raise ValueError("generator does not have full row rank")
    r = np.zeros((n, k), dtype=np.uint8)
    r[pivots, :] = inverse(g[:, pivots])
    return r


def bits_to_int(bits) -> int:
    """Position 0 is the least significant bit."""
    value = 0
    for p, b in enumerate(np.asarray(bits).tolist()):
        if b:
            value |= 1 << p
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    return ((int(value) >> np.arange(width)) & 1).astype(np.uint8)


def mask_table(width: int) -> np.ndarray:
    """All 2^width masks as a (2^width, width) bit matrix, row m holding the bits of m."""
    masks = np.arange(1 << width, dtype=np.int64)
    return ((masks[:, None] >> np.arange(width)) & 1).astype(np.uint8)


def popcount(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    count = np.zeros_like(v)
    while np.any(v):
        count += v & 1
        v = v >> 1
    return count
