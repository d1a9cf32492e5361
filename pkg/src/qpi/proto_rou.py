"""Weights over the p-th roots of unity, and {0, +1, -1} weights through p = 3.

A root exp(2 pi i k / p) is stored as its exponent k mod p, so masking and
unmasking are exact integer operations; only the data inner products use
complex doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra.partition import Partition
from .proto_pm1 import ProtocolError

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class RouElem:
    p: int
    k: int

    def __post_init__(self):
        if self.p < 2:
            raise ProtocolError(f"order must be at least 2, got {self.p}")
        object.__setattr__(self, "k", self.k % self.p)

    @property
    def value(self) -> complex:
        return root(self.p, self.k)

    def __mul__(self, other: "RouElem") -> "RouElem":
        if other.p != self.p:
            raise ProtocolError(f"mixed orders {self.p} and {other.p}")
        return RouElem(self.p, self.k + other.k)

    def inverse(self) -> "RouElem":
        return RouElem(self.p, -self.k)


def root(p: int, k) -> complex | np.ndarray:
    """exp(2 pi i k / p), with the quarter turns snapped to exact values."""
    k = np.asarray(k, dtype=np.int64) % p
    out = np.exp(2j * np.pi * k / p)
    out = np.where((4 * k) % p == 0, np.array([1, 1j, -1, -1j])[(4 * k) // p], out)
    return complex(out) if out.ndim == 0 else out


def symbol_bits(p: int) -> int:
    """Whole wire bits per published exponent."""
    return max(1, (p - 1).bit_length())


def _check_exponents(k, n: int, p: int) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64)
    if k.shape != (n,):
        raise ProtocolError(f"expected {n} exponents, got shape {k.shape}")
    if p < 2:
        raise ProtocolError(f"order must be at least 2, got {p}")
    return k % p


def rou_query(k, p: int, partition: Partition) -> list[np.ndarray]:
    """Per block, the tail exponents shifted by minus the head exponent."""
    k = _check_exponents(k, partition.n, p)
    return [(k[list(b[1:])] - k[b[0]]) % p for b in partition.blocks]


def rou_keys(k, p: int, partition: Partition) -> np.ndarray:
    """Head exponents; multiplying by the head undoes the mask."""
    k = _check_exponents(k, partition.n, p)
    return k[list(partition.heads)]


def rou_vectors(published, p: int) -> list[np.ndarray]:
    return [root(p, np.concatenate(([0], np.asarray(v, dtype=np.int64)))) for v in published]


def rou_projections(published, p: int, partition: Partition) -> np.ndarray:
    V = np.zeros((partition.t, partition.n), dtype=complex)
    for i, (v, block) in enumerate(zip(rou_vectors(published, p), partition.blocks)):
        V[i, list(block)] = v
    return V


def rou_answer(published, p: int, partition: Partition, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (partition.n,):
        raise ProtocolError(f"expected data of length {partition.n}, got shape {x.shape}")
    return rou_projections(published, p, partition) @ x


def rou_decode(keys, p: int, answers) -> complex:
    keys, answers = np.asarray(keys), np.asarray(answers, dtype=complex)
    if keys.shape != answers.shape:
        raise ProtocolError(f"{keys.size} keys for {answers.size} answers")
    return complex(np.dot(root(p, keys), answers))


def query_bits(published, p: int) -> np.ndarray:
    """Exponents packed at symbol_bits(p) bits each, most significant bit first."""
    width = symbol_bits(p)
    flat = [int(v) for block in published for v in block]
    return np.array([(v >> (width - 1 - b)) & 1 for v in flat for b in range(width)], dtype=np.uint8)


# -- {0, +1, -1} weights ----------------------------------------------------

_TERNARY = {0: 0, 1: 1, -1: 2}


def ternary_to_exponents(w) -> np.ndarray:
    """0 -> 1, 1 -> omega, -1 -> conj(omega) with omega = exp(2 pi i / 3)."""
    try:
        return np.array([_TERNARY[int(v)] for v in w], dtype=np.int64)
    except KeyError as exc:
        raise ProtocolError(f"entry {exc.args[0]} is not in {{0, 1, -1}}") from None


def zpm1_roundtrip(w, partition: Partition, x) -> tuple[float, np.ndarray]:
    """Run the p = 3 protocol on the encoded weights; return (w x^T, the t complex answers).

    The user sends real and imaginary parts of each answer, 2t reals.
    """
    k = ternary_to_exponents(w)
    published = rou_query(k, 3, partition)
    answers = rou_answer(published, 3, partition, np.asarray(x, dtype=float))
    total = rou_decode(rou_keys(k, 3, partition), 3, answers)
    return 2.0 / SQRT3 * total.imag, answers
