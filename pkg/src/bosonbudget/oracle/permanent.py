"""Matrix permanents by Ryser's inclusion-exclusion formula."""

from __future__ import annotations

import itertools
import math

import numpy as np

MAX_PERMANENT_SIZE = 30


def permanent(matrix) -> complex:
    """Permanent of a square matrix via Ryser's formula in Gray-code order.

    Integer matrices are evaluated in exact Python integer arithmetic and
    return an ``int``; anything else is evaluated in complex floating point.

    Raises:
        ValueError: for non-square input or ``n > 30``.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_PERMANENT_SIZE:
        raise ValueError(f"permanent of a {n}x{n} matrix exceeds the size guard ({MAX_PERMANENT_SIZE})")
    if n == 0:
        return 1
    exact = np.issubdtype(a.dtype, np.integer)
    if exact:
        cols = [[int(x) for x in a[:, j]] for j in range(n)]
        row_sums = [0] * n
    else:
        cols = [a[:, j].astype(complex) for j in range(n)]
        row_sums = np.zeros(n, dtype=complex)

    total = 0
    gray = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray >> bit & 1:
            if exact:
                row_sums = [r + c for r, c in zip(row_sums, cols[bit])]
            else:
                row_sums = row_sums + cols[bit]
        else:
            if exact:
                row_sums = [r - c for r, c in zip(row_sums, cols[bit])]
            else:
                row_sums = row_sums - cols[bit]
        prod = math.prod(row_sums) if exact else np.prod(row_sums)
        if bin(gray).count("1") & 1:
            total -= prod
        else:
            total += prod
    return total if n % 2 == 0 else -total


def naive_permanent(matrix) -> complex:
    """Permanent by direct expansion over all permutations (O(n! n))."""
    a = np.asarray(matrix)
    n = a.shape[0]
    exact = np.issubdtype(a.dtype, np.integer)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i, j in enumerate(perm):
            term *= int(a[i, j]) if exact else a[i, j]
        total += term
    return total


def permanents_batch(matrices: np.ndarray) -> np.ndarray:
    """Permanents of a stack of small ``(K, n, n)`` matrices, plain subset-sum Ryser."""
    mats = np.asarray(matrices, dtype=complex)
    k, n, _ = mats.shape
    if n == 0:
        return np.ones(k, dtype=complex)
    out = np.zeros(k, dtype=complex)
    for size in range(1, n + 1):
        sign = (-1) ** size
        for subset in itertools.combinations(range(n), size):
            out += sign * np.prod(mats[:, :, list(subset)].sum(axis=2), axis=1)
    return out * (-1) ** n
