"""Joint retrieval of W x^T for m signals at once, viewed over F_{2^m}.

W is an m x n +-1 matrix; its column j is the field element w_j (entry k is
the coefficient of x^k).  The server publishes a good partition of [n] and
the syndrome of w, so the user only sees each block up to a field shift and
returns r_i <= m - log q projections per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra.field import GF2mElem, as_elem
from .algebra.linalg import RationalMatrix, rank_rows, solve_right
from .algebra.partition import (
    Partition,
    parity_check,
    partition_bits,
    partition_rank,
    solve_affine,
    syndrome,
)
from .hadamard import FiniteSet, classify_set
from .proto_pm1 import ProtocolError


def _is_power_of_two(q: int) -> bool:
    return q >= 1 and q & (q - 1) == 0


@dataclass(frozen=True)
class FieldPartition:
    """F_{2^m} split into q cosets of F_1 = Span{1_{A_1}, ..., 1_{A_p}}.

    Elements are handled as polynomial-basis integers.  Cosets are listed by
    their smallest element, which is also the stored shift.
    """

    m: int
    q: int
    base_blocks: Partition
    shifts: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.base_blocks.t

    def subspace(self) -> tuple[int, ...]:
        """Integers of F_1 in increasing order."""
        gens = [sum(1 << k for k in block) for block in self.base_blocks.blocks]
        span = {0}
        for g in gens:
            span |= {s ^ g for s in span}
        return tuple(sorted(span))

    def coset(self, j: int) -> tuple[int, ...]:
        return tuple(sorted(self.shifts[j] ^ s for s in self.subspace()))

    def coset_elems(self, j: int) -> list[GF2mElem]:
        return [GF2mElem.from_int(v, self.m) for v in self.coset(j)]

    def index_of(self, value: int) -> int:
        # cosets of F_1 are determined by the parities inside each base block
        key = self._signature(value)
        for j, shift in enumerate(self.shifts):
            if self._signature(shift) == key:
                return j
        raise AssertionError("cosets do not cover the field")

    def _signature(self, value: int) -> tuple[int, ...]:
        # within a base block, F_1 only flips all bits together, so the
        # relative bits (xor with the block head) name the coset
        out = []
        for block in self.base_blocks.blocks:
            head = (value >> block[0]) & 1
            out.extend(((value >> k) & 1) ^ head for k in block[1:])
        return tuple(out)


def field_partition(m: int, q: int) -> FieldPartition:
    if m < 1:
        raise ProtocolError("need m >= 1")
    if not _is_power_of_two(q) or q > max(1, 1 << (m - 1)):
        raise ProtocolError(f"q must be a power of two with q <= 2^(m-1), got q={q}, m={m}")
    p = m - (q.bit_length() - 1)
    base = Partition.contiguous(m, p)
    fp = FieldPartition(m, q, base, ())
    span = fp.subspace()
    shifts, seen = [], set()
    for value in range(1 << m):
        if value not in seen:
            shifts.append(value)
            seen.update(value ^ s for s in span)
    return FieldPartition(m, q, base, tuple(shifts))


def classify_element(e, fp: FieldPartition) -> int:
    """0-based index of the coset holding e."""
    e = as_elem(e)
    if e.m != fp.m:
        raise ProtocolError(f"degree mismatch: {e.m} != {fp.m}")
    return fp.index_of(e.to_int())


def _column_classes(W: np.ndarray, fp: FieldPartition) -> list[int]:
    return [classify_element(W[:, j], fp) for j in range(W.shape[1])]


def is_good(W, partition: Partition, fp: FieldPartition) -> bool:
    """Each block's columns fall inside a single coset."""
    classes = _column_classes(np.asarray(W), fp)
    return all(len({classes[j] for j in block}) == 1 for block in partition.blocks)


def good_partition(W, t: int, fp: FieldPartition) -> Partition:
    """Refine the coset classes of the columns until there are t blocks.

    The largest block (first among ties) gives up its largest index as a new
    singleton.
    """
    W = np.asarray(W)
    n = W.shape[1]
    if not 1 <= t <= n:
        raise ProtocolError(f"need 1 <= t <= n, got t={t}, n={n}")
    groups: dict[int, list[int]] = {}
    for j, c in enumerate(_column_classes(W, fp)):
        groups.setdefault(c, []).append(j)
    blocks = sorted(groups.values())
    if len(blocks) > t:
        raise ProtocolError(f"columns meet {len(blocks)} cosets, more than t={t}")
    while len(blocks) < t:
        big = max(range(len(blocks)), key=lambda k: (len(blocks[k]), -k))
        blocks.append([blocks[big].pop()])
    return Partition(n, tuple(tuple(b) for b in blocks))


@dataclass(frozen=True)
class JointConfig:
    n: int
    m: int
    t: int
    q: int
    field_partition: FieldPartition

    @classmethod
    def make(cls, n: int, m: int, t: int, q: int) -> "JointConfig":
        if not 1 <= t <= n:
            raise ProtocolError(f"need 1 <= t <= n, got t={t}, n={n}")
        if q > t:
            raise ProtocolError(f"need q <= t, got q={q}, t={t}")
        return cls(n, m, t, q, field_partition(m, q))

    @property
    def syndrome_bits(self) -> int:
        return self.m * (self.n - self.t)

    @property
    def partition_bits(self) -> int:
        return partition_bits(self.n, self.t)

    @property
    def query_bits(self) -> int:
        return self.partition_bits + self.syndrome_bits

    @property
    def ell_worst(self) -> int:
        return self.t * (self.m - (self.q.bit_length() - 1))


@dataclass(frozen=True)
class JointQuery:
    partition: Partition
    rank: int
    syndrome: np.ndarray  # (n - t) x m, one field element per row

    def bits(self, config: JointConfig) -> np.ndarray:
        """Partition rank (MSB first) followed by the syndrome in the +1 <-> 0 encoding."""
        width = config.partition_bits
        head = [(self.rank >> (width - 1 - k)) & 1 for k in range(width)]
        tail = ((1 - self.syndrome.reshape(-1)) // 2).tolist()
        return np.array(head + tail, dtype=np.uint8)


def _check_weights(W, config: JointConfig) -> np.ndarray:
    W = np.asarray(W, dtype=np.int64)
    if W.shape != (config.m, config.n):
        raise ProtocolError(f"expected an {config.m} x {config.n} matrix, got {W.shape}")
    if not (np.abs(W) == 1).all():
        raise ProtocolError("entries must be +1 or -1")
    return W


def joint_query(W, config: JointConfig, partition: Partition | None = None) -> JointQuery:
    W = _check_weights(W, config)
    if partition is None:
        partition = good_partition(W, config.t, config.field_partition)
    elif partition.t != config.t or not is_good(W, partition, config.field_partition):
        raise ProtocolError("partition is not good for W")
    M = parity_check(partition, config.m)
    return JointQuery(partition, partition_rank(partition), syndrome(M, W.T))


def joint_shift(query: JointQuery, config: JointConfig) -> np.ndarray:
    """U (m x n): the canonical solution of M (.) u^T = q, as columns."""
    M = parity_check(query.partition, config.m)
    if len(query.syndrome) == 0:
        return np.ones((config.m, config.n), dtype=np.int64)
    return solve_affine(M, query.syndrome).T


def joint_shift_and_keys(W, config: JointConfig, query: JointQuery) -> tuple[np.ndarray, np.ndarray]:
    """(U, keys) where keys[i] = u_{S_i,1} + w_{S_i,1} in F_{2^m}, as a t x m array."""
    W = _check_weights(W, config)
    U = joint_shift(query, config)
    heads = list(query.partition.heads)
    return U, (U[:, heads] * W[:, heads]).T


def block_factors(U: np.ndarray, partition: Partition) -> list[np.ndarray]:
    """R_i: the lexicographically first maximal independent rows of U|_{S_i}."""
    out = []
    for block in partition.blocks:
        Ui = U[:, list(block)]
        _, rows = rank_rows(Ui)
        out.append(Ui[list(rows)])
    return out


def joint_answer(query: JointQuery, config: JointConfig, x) -> list[np.ndarray]:
    """Per block, the r_i reals R_i (x|_{S_i})^T."""
    x = np.asarray(x, dtype=float)
    if x.shape != (config.n,):
        raise ProtocolError(f"expected data of length {config.n}, got shape {x.shape}")
    U = joint_shift(query, config)
    return [R @ x[list(b)] for R, b in zip(block_factors(U, query.partition), query.partition.blocks)]


def joint_projections(query: JointQuery, config: JointConfig) -> np.ndarray:
    """Rows v with answers = v @ x, stacked over blocks."""
    U = joint_shift(query, config)
    rows = []
    for R, block in zip(block_factors(U, query.partition), query.partition.blocks):
        for r in R:
            v = np.zeros(config.n, dtype=np.int64)
            v[list(block)] = r
            rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(-1, config.n)


def server_factors(query: JointQuery, config: JointConfig) -> list[RationalMatrix]:
    """Q_i with Q_i R_i = U_i, solved exactly."""
    U = joint_shift(query, config)
    return [
        solve_right(R, U[:, list(b)])
        for R, b in zip(block_factors(U, query.partition), query.partition.blocks)
    ]


def joint_decode(keys, factors: Sequence[RationalMatrix], answers: Sequence[np.ndarray]) -> np.ndarray:
    """sum_i diag(keys_i) Q_i (R_i x|_{S_i}^T), which equals W x^T."""
    keys = np.asarray(keys)
    if not len(keys) == len(factors) == len(answers):
        raise ProtocolError(f"{len(keys)} keys, {len(factors)} factors, {len(answers)} answers")
    out = np.zeros(keys.shape[1], dtype=float)
    for key, Q, a in zip(keys, factors, answers):
        a = np.asarray(a, dtype=float)
        if Q.shape != (len(key), len(a)):
            raise ProtocolError(f"factor of shape {Q.shape} does not match {len(a)} answers")
        out += key * (Q.to_numpy() @ a)
    return out


# -- perfect sets -----------------------------------------------------------


def perfect_lambdas(A: FiniteSet) -> tuple[Fraction, ...]:
    """lambda_1..lambda_m of a perfect set (lambda_0 is zero since sum(A) = 0)."""
    cls = classify_set(A)
    if cls.kind != "perfect":
        raise ProtocolError(f"set {A} is not perfect")
    return cls.perfect_lambdas


def perfect_encode(w, lambdas: Sequence) -> np.ndarray:
    """m x n sign matrix with sum_i lambdas_i * row_i = w."""
    lambdas = [Fraction(v) for v in lambdas]
    m = len(lambdas)
    table: dict[Fraction, tuple[int, ...]] = {}
    for code in range(1 << m):
        eps = tuple(1 - 2 * ((code >> i) & 1) for i in range(m))
        table.setdefault(sum((e * lam for e, lam in zip(eps, lambdas)), Fraction(0)), eps)
    try:
        cols = [table[Fraction(v)] for v in w]
    except KeyError as exc:
        raise ProtocolError(f"value {exc.args[0]} is not a signed sum of the coefficients") from None
    return np.array(cols, dtype=np.int64).reshape(len(cols), m).T


def perfect_decode(signals, lambdas: Sequence) -> float:
    """sum_i lambdas_i * signals_i."""
    signals = np.asarray(signals, dtype=float)
    if signals.shape != (len(lambdas),):
        raise ProtocolError(f"{signals.size} signals for {len(lambdas)} coefficients")
    return float(sum(float(lam) * s for lam, s in zip(lambdas, signals)))
