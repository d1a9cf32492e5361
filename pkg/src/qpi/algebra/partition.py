"""Set partitions of {0, ..., n-1}, parity-check matrices and the shared solver.

Indices are 0-based throughout.  A partition is stored in restricted-growth
normal form: every block sorted, blocks ordered by their smallest element.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .field import to_bits, from_bits


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(int(i) for i in b)) for b in self.blocks), key=lambda b: b[:1]))
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for block in blocks:
            if not block:
                raise PartitionError("empty block")
            for i in block:
                if not 0 <= i < self.n:
                    raise PartitionError(f"index {i} outside [0, {self.n})")
                if i in seen:
                    raise PartitionError(f"index {i} appears in two blocks")
                seen.add(i)
        if len(seen) != self.n:
            raise PartitionError("blocks do not cover the ground set")

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def heads(self) -> tuple[int, ...]:
        """First (smallest) element of every block."""
        return tuple(b[0] for b in self.blocks)

    @classmethod
    def contiguous(cls, n: int, t: int) -> "Partition":
        """Contiguous near-equal blocks, larger blocks first."""
        if not 1 <= t <= n:
            raise PartitionError(f"need 1 <= t <= n, got t={t}, n={n}")
        base, extra = divmod(n, t)
        blocks, start = [], 0
        for i in range(t):
            size = base + (1 if i < extra else 0)
            blocks.append(tuple(range(start, start + size)))
            start += size
        return cls(n, tuple(blocks))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        blocks: dict[int, list[int]] = {}
        for i, label in enumerate(rgs):
            blocks.setdefault(label, []).append(i)
        return cls(len(rgs), tuple(tuple(b) for b in blocks.values()))

    def rgs(self) -> tuple[int, ...]:
        labels = [0] * self.n
        for k, block in enumerate(self.blocks):
            for i in block:
                labels[i] = k
        return tuple(labels)

    def block_of(self) -> np.ndarray:
        return np.array(self.rgs(), dtype=np.int64)

    def __str__(self):
        return "|".join(",".join(str(i) for i in b) for b in self.blocks)


def char_vector(block: Iterable[int], n: int) -> np.ndarray:
    """+-1 characteristic vector: -1 on the block, +1 elsewhere."""
    v = np.ones(n, dtype=np.int64)
    for i in block:
        if not 0 <= i < n:
            raise PartitionError(f"index {i} outside [0, {n})")
        v[i] = -1
    return v


@lru_cache(maxsize=None)
def stirling2(n: int, t: int) -> int:
    if n == t:
        return 1
    if t == 0 or t > n:
        return 0
    return t * stirling2(n - 1, t) + stirling2(n - 1, t - 1)


def partition_bits(n: int, t: int) -> int:
    """Whole bits needed to name one partition of [n] into t blocks."""
    return (stirling2(n, t) - 1).bit_length()


@lru_cache(maxsize=None)
def _completions(remaining: int, used: int, t: int) -> int:
    # RGS suffixes of given length taking the block count from `used` to exactly t
    if remaining == 0:
        return 1 if used == t else 0
    if used > t or used + remaining < t:
        return 0
    return used * _completions(remaining - 1, used, t) + _completions(remaining - 1, used + 1, t)


def partition_rank(p: Partition) -> int:
    """Lexicographic rank of the partition's RGS among partitions with p.t blocks."""
    rgs = p.rgs()
    rank, used = 0, 1
    for i in range(1, p.n):
        remaining = p.n - i - 1
        for label in range(rgs[i]):
            rank += _completions(remaining, max(used, label + 1), p.t)
        used = max(used, rgs[i] + 1)
    return rank


def partition_unrank(r: int, n: int, t: int) -> Partition:
    total = stirling2(n, t)
    if not 0 <= r < total:
        raise PartitionError(f"rank {r} outside [0, {total})")
    rgs, used = [0], 1
    for i in range(1, n):
        remaining = n - i - 1
        for label in range(min(used, t - 1) + 1):
            count = _completions(remaining, max(used, label + 1), t)
            if r < count:
                break
            r -= count
        rgs.append(label)
        used = max(used, label + 1)
    return Partition.from_rgs(rgs)


@lru_cache(maxsize=4096)
def parity_check(p: Partition, field_degree: int = 1) -> np.ndarray:
    """(n - t) x n parity-check matrix of Span{1_{S_i}}.

    Each block contributes one row per consecutive pair of its elements, with
    field-one at both positions.  Entries are returned as bits (0 = field-zero,
    1 = field-one); they lie in the prime subfield, so the same matrix serves
    every extension degree.
    """
    if field_degree < 1:
        raise PartitionError("field degree must be positive")
    rows = []
    for block in p.blocks:
        for a, b in zip(block, block[1:]):
            row = np.zeros(p.n, dtype=np.uint8)
            row[a] = row[b] = 1
            rows.append(row)
    M = np.array(rows, dtype=np.uint8) if rows else np.zeros((0, p.n), dtype=np.uint8)
    M.flags.writeable = False  # cached and shared
    return M


def syndrome(M: np.ndarray, values: np.ndarray) -> np.ndarray:
    """M (.) v^T over F_{2^m} for a 0/1 matrix M.

    ``values`` is an n x m array of +-1 rows (one field element per row, or a
    length-n vector for m = 1).  The result has the same layout.
    """
    values = np.asarray(values)
    vector = values.ndim == 1
    bits = to_bits(values.reshape(len(values), -1))
    out = from_bits((M.astype(np.int64) @ bits) % 2)
    return out.reshape(-1) if vector else out


class InconsistentSystem(ValueError):
    pass


@lru_cache(maxsize=4096)
def _eliminate(key: bytes, rows: int, cols: int):
    """Row-reduce M over F_2 once; return pivot columns and the reducing transform."""
    M = np.frombuffer(key, dtype=np.uint8).reshape(rows, cols).copy()
    T = np.eye(rows, dtype=np.uint8)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(M[r:, c])[0]
        if hit.size == 0:
            continue
        k = r + hit[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
            T[[r, k]] = T[[k, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
                T[i] ^= T[r]
        pivots.append(c)
        r += 1
    return tuple(pivots), T, r


def solve_affine(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Deterministic solution y of M (.) y^T = b over F_{2^m}.

    Gauss-Jordan with pivots chosen left to right; every free variable is set
    to field-zero (+1).  ``b`` uses the layout of :func:`syndrome`.
    """
    M = np.ascontiguousarray(M, dtype=np.uint8)
    rows, cols = M.shape
    b = np.asarray(b)
    vector = b.ndim == 1
    b_bits = to_bits(b.reshape(rows, -1)) if rows else np.zeros((0, 1 if vector else b.shape[-1]), np.uint8)
    width = b_bits.shape[1]
    if len(b_bits) != rows:
        raise InconsistentSystem(f"syndrome has {len(b_bits)} entries, matrix has {rows} rows")
    pivots, T, rank = _eliminate(M.tobytes(), rows, cols)
    reduced = (T.astype(np.int64) @ b_bits) % 2
    if reduced[rank:].any():
        raise InconsistentSystem("no solution")
    y = np.zeros((cols, width), dtype=np.int64)
    for k, c in enumerate(pivots):
        y[c] = reduced[k]
    y = from_bits(y)
    return y.reshape(-1) if vector else y
