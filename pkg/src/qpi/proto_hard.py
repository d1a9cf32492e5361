"""Hadamard-dictionary protocol for weights over an arbitrary set A, |A| = 2^m.

Each weight a_k is replaced by row k of H_{2^m}, giving 2^m - 1 sign vectors
w^(i) with w = sum_i lambda_i w^(i) + lambda_0 1.  Only the m anchor rows on
the independent columns are published (block-masked); the user rebuilds the
rest because every column of W is a Hadamard row.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

import numpy as np

from .algebra.partition import Partition
from .hadamard import FiniteSet, coefficient_vector, independent_columns, row_from_subvector, sylvester
from .proto_pm1 import ProtocolError


@dataclass(frozen=True)
class HardConfig:
    n: int
    A: FiniteSet
    partition: Partition

    def __post_init__(self):
        if self.partition.n != self.n:
            raise ProtocolError(f"partition is over [{self.partition.n}], expected [{self.n}]")
        self.A.log_size  # raises unless |A| is a power of two

    @classmethod
    def make(cls, n: int, t: int, A: FiniteSet, partition: Partition | None = None) -> "HardConfig":
        return cls(n, A, partition or Partition.contiguous(n, t))

    @property
    def m(self) -> int:
        return self.A.log_size

    @property
    def t(self) -> int:
        return self.partition.t

    @cached_property
    def lam(self) -> tuple[Fraction, ...]:
        return coefficient_vector(self.A)[0]

    @property
    def anchors(self) -> tuple[int, ...]:
        """Rows of W published to the user: the independent Hadamard columns."""
        return independent_columns(self.m)

    @property
    def answered_rows(self) -> tuple[int, ...]:
        """Rows i >= 1 with lambda_i != 0; the others contribute nothing."""
        return tuple(i for i, v in enumerate(self.lam) if i and v != 0)

    @property
    def query_bits(self) -> int:
        return self.m * (self.n - self.t)

    @property
    def ell(self) -> int:
        return len(self.answered_rows) * self.t + 1


def hard_decompose(w, config: HardConfig) -> np.ndarray:
    """W with column j equal to Hadamard row k whenever w_j = a_k (row 0 is all-ones)."""
    H = sylvester(config.m)
    try:
        rows = [config.A.index(v) for v in w]
    except ValueError:
        raise ProtocolError("weight outside the alphabet") from None
    if len(rows) != config.n:
        raise ProtocolError(f"expected {config.n} weights, got {len(rows)}")
    return H[rows].T.copy()


def recompose(W: np.ndarray, lam) -> list[Fraction]:
    """sum_i lambda_i W[i] (row 0 carries lambda_0), exactly."""
    return [sum((int(W[i, j]) * lam[i] for i in range(len(lam))), Fraction(0)) for j in range(W.shape[1])]


def hard_keys(W: np.ndarray, config: HardConfig) -> np.ndarray:
    """keys[i, j] = w^(i) at the head of S_j."""
    return W[:, list(config.partition.heads)]


def hard_query(W: np.ndarray, config: HardConfig) -> list[list[np.ndarray]]:
    """For each anchor row (ascending) and block: head-masked tail of the block."""
    out = []
    for i in config.anchors:
        row = W[i]
        out.append([row[b[0]] * row[list(b[1:])] for b in config.partition.blocks])
    return out


def query_bits(query: list[list[np.ndarray]]) -> np.ndarray:
    flat = [v for per_row in query for block in per_row for v in block]
    return ((1 - np.array(flat, dtype=np.int64)) // 2).astype(np.uint8)


def hard_user_expand(query: list[list[np.ndarray]], config: HardConfig) -> np.ndarray:
    """Rebuild the block-masked matrix W-hat from the anchor rows."""
    m, n = config.m, config.n
    anchor_vals = np.ones((m, n), dtype=np.int64)
    for r, per_row in enumerate(query):
        for block, tail in zip(config.partition.blocks, per_row):
            anchor_vals[r, list(block[1:])] = tail
    What = np.empty((1 << m, n), dtype=np.int64)
    for j in range(n):
        _, row = row_from_subvector(anchor_vals[:, j], m)
        What[:, j] = row
    return What


def hard_projections(What: np.ndarray, config: HardConfig) -> np.ndarray:
    """Rows v_{i,j} in (i, j) order, then the all-ones row; answers = V @ x."""
    rows = []
    for i in config.answered_rows:
        for block in config.partition.blocks:
            v = np.zeros(config.n, dtype=np.int64)
            v[list(block)] = What[i, list(block)]
            rows.append(v)
    rows.append(np.ones(config.n, dtype=np.int64))
    return np.array(rows)


def hard_answer(What: np.ndarray, config: HardConfig, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (config.n,):
        raise ProtocolError(f"expected data of length {config.n}, got shape {x.shape}")
    return hard_projections(What, config) @ x


def hard_decode(keys: np.ndarray, config: HardConfig, answers) -> float:
    """sum_{i,j} lambda_i keys[i, j] a_{i,j} + lambda_0 * (1 x^T)."""
    answers = np.asarray(answers, dtype=float)
    rows = config.answered_rows
    if answers.shape != (len(rows) * config.t + 1,):
        raise ProtocolError(f"expected {len(rows) * config.t + 1} answers, got {answers.size}")
    lam = config.lam
    grid = answers[:-1].reshape(len(rows), config.t)
    total = float(lam[0]) * answers[-1]
    for r, i in enumerate(rows):
        total += float(lam[i]) * float(np.dot(keys[i], grid[r]))
    return float(total)
