"""Exact linear algebra over the rationals for small +-1 and rational matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np


class LinalgError(ValueError):
    pass


@dataclass(frozen=True)
class RationalMatrix:
    entries: tuple[tuple[Fraction, ...], ...]
    cols: int

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "RationalMatrix":
        rows = [tuple(Fraction(v) for v in row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise LinalgError("ragged rows")
        return cls(tuple(rows), cols)

    @classmethod
    def identity(cls, k: int) -> "RationalMatrix":
        return cls.from_rows([[int(i == j) for j in range(k)] for i in range(k)], k)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
        cols_t = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols_t] for row in self.entries]
        return RationalMatrix.from_rows(out, other.cols)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(-v for v in row) for row in self.entries), self.cols)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows(list(zip(*self.entries)) if self.rows else [], self.rows)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries], dtype=float).reshape(self.shape)


def as_rational(M) -> RationalMatrix:
    if isinstance(M, RationalMatrix):
        return M
    arr = np.asarray(M)
    if arr.ndim != 2:
        raise LinalgError("expected a 2-d matrix")
    return RationalMatrix.from_rows(arr.tolist(), arr.shape[1])


def _integer_rows(M) -> list[list[int]]:
    # rational rows scaled to primitive integer rows; rank and independence are unchanged
    out = []
    for row in as_rational(M).entries:
        den = 1
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def _reduce(row: list[int], basis: list[tuple[int, list[int]]]) -> list[int]:
    for pivot, brow in basis:
        if row[pivot]:
            a, b = brow[pivot], row[pivot]
            row = [a * x - b * y for x, y in zip(row, brow)]
            g = 0
            for x in row:
                g = gcd(g, x)
            if g > 1:
                row = [x // g for x in row]
    return row


def rank_rows(M) -> tuple[int, tuple[int, ...]]:
    """Rank over R and the lexicographically first maximal independent row set.

    Rows are scanned top to bottom and kept when independent of the rows kept
    so far (fraction-free integer elimination, so the result is exact).
    """
    basis: list[tuple[int, list[int]]] = []
    chosen: list[int] = []
    for i, row in enumerate(_integer_rows(M)):
        row = _reduce(row, basis)
        nz = next((j for j, x in enumerate(row) if x), None)
        if nz is not None:
            basis.append((nz, row))
            chosen.append(i)
    return len(chosen), tuple(chosen)


def rank(M) -> int:
    return rank_rows(M)[0]


def inverse(M) -> RationalMatrix:
    A = [list(r) for r in as_rational(M).entries]
    k = len(A)
    if any(len(r) != k for r in A):
        raise LinalgError("inverse of a non-square matrix")
    inv = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for c in range(k):
        p = next((r for r in range(c, k) if A[r][c] != 0), None)
        if p is None:
            raise LinalgError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv[c], inv[p] = inv[p], inv[c]
        f = A[c][c]
        A[c] = [v / f for v in A[c]]
        inv[c] = [v / f for v in inv[c]]
        for r in range(k):
            if r != c and A[r][c] != 0:
                g = A[r][c]
                A[r] = [x - g * y for x, y in zip(A[r], A[c])]
                inv[r] = [x - g * y for x, y in zip(inv[r], inv[c])]
    return RationalMatrix.from_rows(inv, k)


def solve_right(R, U) -> RationalMatrix:
    """Exact Q with Q R = U, namely Q = U R^T (R R^T)^{-1}.

    R must have full row rank and every row of U must lie in its row span.
    """
    R, U = as_rational(R), as_rational(U)
    if R.cols != U.cols:
        raise LinalgError(f"column mismatch: R has {R.cols}, U has {U.cols}")
    Rt = R.transpose()
    Q = U @ Rt @ inverse(R @ Rt)
    if Q @ R != U:
        raise LinalgError("rows of U are not in the row span of R")
    return Q


def solve_vector(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """One exact solution of A y = b (free variables zero), or None if inconsistent."""
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A, b)]
    ncols = len(rows[0]) - 1 if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        f = rows[r][c]
        rows[r] = [v / f for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                g = rows[i][c]
                rows[i] = [x - g * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    y = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        y[c] = rows[i][-1]
    return y
