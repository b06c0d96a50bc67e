"""Numeric rank/kernels (SVD) and exact rational elimination."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

RANK_RTOL = 1e-8
RANK_ATOL = 1e-10


def singular_values(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def numeric_rank(A: np.ndarray, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> int:
    """Count singular values above max(rtol * largest, atol)."""
    s = singular_values(A)
    if s.size == 0 or s[0] <= atol:
        return 0
    return int((s > max(rtol * s[0], atol)).sum())


def kernel_basis(A: np.ndarray, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal columns spanning the numeric kernel of A (rows x cols)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if A.shape[0] == 0 or A.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(A)
    r = numeric_rank(A, rtol, atol)
    return vt[r:].T.copy()


def cokernel_basis(A: np.ndarray, g: int, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal columns spanning the complement of the column space of A (g x r)."""
    if g == 0:
        return np.zeros((0, 0))
    A = np.asarray(A, dtype=float).reshape(g, -1)
    if A.shape[1] == 0:
        return np.eye(g)
    u, s, _ = np.linalg.svd(A)
    r = numeric_rank(A, rtol, atol)
    return u[:, r:].copy()


# --- exact elimination over Q -------------------------------------------------

def rref(rows: Sequence[Sequence[Fraction]]):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_q(rows) -> int:
    return len(rref(rows)[1])


def nullspace_q(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : rows . v = 0} over Q."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        out.append(v)
    return out


def solve_q(columns: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Some x with sum_j x_j columns[j] = b, or None when inconsistent."""
    nrows = len(b)
    ncols = len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(ncols)] + [Fraction(b[i])] for i in range(nrows)]
    R, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(R, piv):
        x[pc] = row[ncols]
    return x


def in_span_q(vectors: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    if not vectors:
        return all(x == 0 for x in v)
    return solve_q(vectors, v) is not None
