"""Exact integer linear algebra: Smith normal form, unimodular completion and
the annihilating covector used by the contour-integral spectrum.

All integer work is done with Python ints, so nothing overflows.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

__all__ = [
    "SnfResult",
    "AnnihilatorCovector",
    "as_int_matrix",
    "int_det",
    "matmul",
    "identity",
    "smith_normal_form",
    "unimodular_completion",
    "unimodular_inverse",
    "annihilator",
    "lattice_index",
]

IntMat = list  # list of lists of Python ints


def as_int_matrix(A) -> IntMat:
    """Copy ``A`` into a list-of-lists of Python ints, refusing non-integers."""
    rows = [list(r) for r in (A.tolist() if isinstance(A, np.ndarray) else A)]
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    ncols = len(rows[0])
    out = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        row = []
        for x in r:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
                x = x.numerator
            elif isinstance(x, float):
                if not x.is_integer():
                    raise ValueError(f"non-integer entry {x}")
            row.append(int(x))
        out.append(row)
    return out


def identity(n: int) -> IntMat:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMat, B: IntMat) -> IntMat:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def int_det(A: IntMat):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in A]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num // prev if isinstance(num, int) else num / prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMat
    D: IntMat
    V: IntMat

    @property
    def invariant_factors(self) -> list:
        k = min(len(self.D), len(self.D[0]))
        return [self.D[i][i] for i in range(k)]


def smith_normal_form(A) -> SnfResult:
    """Smith normal form of an integer matrix.

    Pivots on the smallest nonzero entry (in absolute value) of the remaining
    block, which keeps intermediate growth small for the matrix sizes used here.

    Parameters
    ----------
    A : array-like of int, shape (m, n)

    Returns
    -------
    SnfResult
        ``U A V = D`` exactly; the diagonal of ``D`` is nonnegative and each
        entry divides the next, zeros last.
    """
    D = as_int_matrix(A)
    if all(x == 0 for r in D for x in r):
        raise ValueError("Smith normal form of the zero matrix is not defined here")
    m, n = len(D), len(D[0])
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (D, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):
        for M in (D, V):
            for r in M:
                r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return SnfResult(U, D, V)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(U, D, V)


def unimodular_inverse(J: IntMat) -> IntMat:
    """Inverse of a unimodular integer matrix (exact, via the adjugate)."""
    J = as_int_matrix(J)
    n = len(J)
    det = int_det(J)
    if det not in (1, -1):
        raise ValueError("matrix is not unimodular")
    if n == 1:
        return [[det]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(J) if k != i]
            adj[j][i] = (-1) ** (i + j) * int_det(minor)
    return [[det * x for x in r] for r in adj]


def unimodular_completion(gamma: Sequence[int]) -> IntMat:
    """Return ``J`` with ``det J = ±1`` and ``J @ gamma = e_m``.

    ``J`` is read off the Smith normal form of ``gamma`` as a column; it is one
    of infinitely many valid answers.
    """
    g = [int(x) for x in gamma]
    if not g:
        raise ValueError("empty gamma")
    d = 0
    for x in g:
        d = gcd(d, x)
    if d != 1:
        raise ValueError("gamma not primitive")
    m = len(g)
    snf = smith_normal_form([[x] for x in g])
    # U g V = e_1 with V = [±1]
    U = [[x * snf.V[0][0] for x in row] for row in snf.U]
    J = U[1:] + U[:1]
    if m > 1 and int_det(J) not in (1, -1):  # pragma: no cover - U is unimodular
        raise ArithmeticError("completion lost unimodularity")
    return J


@dataclass(frozen=True)
class AnnihilatorCovector:
    alpha: np.ndarray
    delta: float


def annihilator(b: Sequence[float], gamma: Sequence[int], delta: float) -> AnnihilatorCovector:
    """Covector ``alpha`` with ``alpha^T M = 0`` and ``alpha^T gamma = delta``
    for ``M = [I_n; -b^T]``.
    """
    b = np.asarray(b, dtype=float).ravel()
    gamma = np.asarray(gamma, dtype=float).ravel()
    if gamma.size != b.size + 1:
        raise ValueError("gamma must have length n + 1")
    if not delta > 0:
        raise ValueError("delta must be positive")
    denom = float(b @ gamma[:-1] + gamma[-1])
    if denom == 0.0:
        raise ZeroDivisionError("b . gamma' + gamma_m vanishes")
    alpha = (delta / denom) * np.append(b, 1.0)
    return AnnihilatorCovector(alpha, float(delta))


def lattice_index(vectors) -> int:
    """Index of the lattice spanned by integer ``vectors`` in ``Z^m``
    (0 when they do not span a full-rank sublattice)."""
    A = as_int_matrix(vectors)
    m = len(A[0])
    cols = [list(c) for c in zip(*A)]  # m x k
    snf = smith_normal_form(cols)
    d = snf.invariant_factors
    if len(d) < m or any(x == 0 for x in d[:m]):
        return 0
    out = 1
    for x in d[:m]:
        out *= x
    return out
