"""Exact rank computations over the rationals."""

from __future__ import annotations

from math import lcm

import numpy as np
from gmpy2 import mpq, mpz


def _integer_rows(matrix):
    rows = []
    for row in matrix:
        row = [mpq(x) for x in row]
        den = 1
        for x in row:
            den = lcm(den, int(x.denominator))
        ints = [mpz(x * den) for x in row]
        if any(ints):
            rows.append(ints)
    return rows


def rank(matrix) -> int:
    """Rank by fraction-free (Bareiss) elimination on a cleared-denominator copy."""
    rows = _integer_rows(np.asarray(matrix, dtype=object).tolist()
                         if isinstance(matrix, np.ndarray) else matrix)
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    prev = mpz(1)
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            rows[i] = [(p * x - a * y) // prev for x, y in zip(rows[i], rows[r])]
        prev = p
        r += 1
        if r == len(rows):
            break
    return r


def nullity(matrix, ncols: int) -> int:
    return ncols - rank(matrix)


def nullspace(columns) -> list:
    """Basis of ``{x : sum_j x_j columns[j] = 0}`` by exact reduced row echelon form."""
    ncols = len(columns)
    if ncols == 0:
        return []
    rows = [[mpq(c[i]) for c in columns] for i in range(len(columns[0]))]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                a = rows[i][c]
                rows[i] = [x - a * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [mpq(0)] * ncols
        v[free] = mpq(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][free]
        basis.append(v)
    return basis


def inverse(m) -> np.ndarray:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix must be square")
    aug = np.empty((n, 2 * n), dtype=object)
    for i in range(n):
        for j in range(n):
            aug[i, j] = mpq(m[i, j])
            aug[i, n + j] = mpq(1 if i == j else 0)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = aug[col] / aug[col, col]
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[col]
    return aug[:, n:]
