"""Exact linear algebra over the rationals, with a fast certified mod-p path.

Matrices are lists of row lists.  Exact routines work on ``Fraction`` (int
entries are accepted and promoted).  ``rank_modp`` runs vectorised Gaussian
elimination over a fixed word-size prime; since specialising to GF(p) can
only lower the rank, a mod-p rank is always a certified lower bound for the
rational rank.  The Betti routines in :mod:`flatfill.filling` exploit this to
certify *zero* homology without touching big rationals.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# Largest Mersenne prime fitting comfortably in int64 products: entries stay
# below p, so a*b < p**2 < 2**62 never overflows.
MODP_PRIME = 2**31 - 1


def _as_fraction_rows(mat):
    return [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in mat]


def rref(mat):
    """Reduced row echelon form. Returns (rref_rows, pivot_column_indices)."""
    rows = _as_fraction_rows(mat)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat):
    """Exact rank over Q."""
    if not mat or not mat[0]:
        return 0
    return len(rref(mat)[1])


def rank_modp(mat, p=MODP_PRIME):
    """Rank of an integer matrix over GF(p); a lower bound for the Q-rank."""
    if not mat or not mat[0]:
        return 0
    a = np.array(mat, dtype=np.int64) % p
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        below = a[r + 1 :, c]
        mask = below != 0
        if mask.any():
            a[r + 1 :][mask] = (a[r + 1 :][mask] - np.outer(below[mask], a[r])) % p
        r += 1
    return r


def solve(A, b):
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero.
    """
    if not A or not A[0]:
        return None if any(x != 0 for x in b) else []
    ncols = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return x


def nullspace(A):
    """Basis of the kernel of A as a list of column vectors."""
    if not A or not A[0]:
        return []
    ncols = len(A[0])
    red, pivots = rref(A)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][free]
        basis.append(v)
    return basis


def column_space_basis(A):
    """Pivot columns of A: returns (list of column vectors, pivot indices)."""
    if not A or not A[0]:
        return [], []
    _, pivots = rref(A)
    cols = [[Fraction(row[c]) for row in A] for c in pivots]
    return cols, pivots


def matmul(A, B):
    if not A or not B:
        return []
    n = len(B[0])
    out = []
    for row in A:
        out.append([sum((row[k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(n)])
    return out


def identity_matrix(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def invert(A):
    """Exact inverse of a square matrix, or None if singular."""
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]
