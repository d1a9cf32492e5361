"""Private inner products for w in {+1, -1}^n: coset, random-key and improved random-key.

Every protocol fixes a public partition S_1, ..., S_t of [n].  The user only
ever learns one signed copy of w per block, and answers with one real inner
product per block; the server removes the signs with its keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra.partition import Partition, parity_check, solve_affine, syndrome

VARIANTS = ("coset", "random_key", "improved_random_key")


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class Pm1ProtocolConfig:
    n: int
    partition: Partition
    variant: str = "coset"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ProtocolError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.partition.n != self.n:
            raise ProtocolError(f"partition is over [{self.partition.n}], expected [{self.n}]")

    @classmethod
    def make(cls, n: int, t: int, variant: str = "coset", partition: Partition | None = None):
        """Config with the contiguous near-equal partition unless one is given."""
        if partition is None:
            partition = Partition.contiguous(n, t)
        elif partition.t != t:
            raise ProtocolError(f"partition has {partition.t} blocks, expected {t}")
        return cls(n, partition, variant)

    @property
    def t(self) -> int:
        return self.partition.t

    @property
    def query_bits(self) -> int:
        """Published bits: n - t, except n for the basic random-key variant."""
        return self.n if self.variant == "random_key" else self.n - self.t


def _check_pm1(w, n: int) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (n,):
        raise ProtocolError(f"expected a length-{n} vector, got shape {w.shape}")
    if not (np.abs(w) == 1).all():
        raise ProtocolError("entries must be +1 or -1")
    return w


def _check_data(x, n: int, dtype=float) -> np.ndarray:
    x = np.asarray(x, dtype=dtype)
    if x.shape != (n,):
        raise ProtocolError(f"expected data of length {n}, got shape {x.shape}")
    return x


def block_answers(vectors: Sequence[np.ndarray], partition: Partition, x: np.ndarray) -> np.ndarray:
    """Inner products (v_i)(x|_{S_i})^T, one per block."""
    return np.array([np.dot(v, x[list(block)]) for v, block in zip(vectors, partition.blocks)])


def block_projections(vectors: Sequence[np.ndarray], partition: Partition) -> np.ndarray:
    """t x n matrix whose row i is v_i placed on S_i; answers equal rows @ x."""
    V = np.zeros((partition.t, partition.n), dtype=np.result_type(*vectors, np.int64))
    for i, (v, block) in enumerate(zip(vectors, partition.blocks)):
        V[i, list(block)] = v
    return V


def decode(keys, answers) -> float:
    """Sum of key-signed answers."""
    keys, answers = np.asarray(keys), np.asarray(answers)
    if keys.shape != answers.shape:
        raise ProtocolError(f"{keys.size} keys for {answers.size} answers")
    return complex(np.dot(keys, answers)) if np.iscomplexobj(answers) else float(np.dot(keys, answers))


# -- coset protocol ---------------------------------------------------------


def coset_query(w, config: Pm1ProtocolConfig) -> np.ndarray:
    """Syndrome M (.) w^T of length n - t."""
    w = _check_pm1(w, config.n)
    return syndrome(parity_check(config.partition), w)


def coset_shift(q, config: Pm1ProtocolConfig) -> np.ndarray:
    """u = B(M, q), the canonical coset member both parties compute."""
    return solve_affine(parity_check(config.partition), np.asarray(q, dtype=np.int64))


def coset_keys(w, config: Pm1ProtocolConfig, q) -> tuple[np.ndarray, np.ndarray]:
    """(u, keys) with u|_{S_i} = keys_i * w|_{S_i} on every block."""
    w = _check_pm1(w, config.n)
    u = coset_shift(q, config)
    heads = list(config.partition.heads)
    return u, u[heads] * w[heads]


def coset_vectors(q, config: Pm1ProtocolConfig) -> list[np.ndarray]:
    u = coset_shift(q, config)
    return [u[list(b)] for b in config.partition.blocks]


def coset_answer(q, config: Pm1ProtocolConfig, x) -> np.ndarray:
    x = _check_data(x, config.n)
    return block_answers(coset_vectors(q, config), config.partition, x)


def coset_decode(keys, answers) -> float:
    return decode(keys, answers)


# -- random-key protocols ---------------------------------------------------


def randkey_query(w, config: Pm1ProtocolConfig, rng: np.random.Generator | None = None, keys=None):
    """Published per-block vectors and the keys the server keeps.

    Basic: block i is published as keys_i * w|_{S_i} with uniform keys (drawn
    from ``rng`` unless given explicitly).  Improved: the key is the block
    head and only the masked tail is sent.
    """
    w = _check_pm1(w, config.n)
    blocks = config.partition.blocks
    if config.variant == "random_key":
        if keys is None:
            if rng is None:
                raise ProtocolError("the basic random-key variant needs an rng or explicit keys")
            keys = rng.choice(np.array([1, -1]), size=config.t)
        keys = _check_pm1(keys, config.t)
        published = [k * w[list(b)] for k, b in zip(keys, blocks)]
    elif config.variant == "improved_random_key":
        keys = w[list(config.partition.heads)]
        published = [k * w[list(b[1:])] for k, b in zip(keys, blocks)]
    else:
        raise ProtocolError("randkey_query needs a random-key variant")
    return published, np.asarray(keys, dtype=np.int64)


def randkey_vectors(published, config: Pm1ProtocolConfig) -> list[np.ndarray]:
    if config.variant == "improved_random_key":
        # the masked head is always +1, so the user restores it locally
        return [np.concatenate(([1], np.asarray(v, dtype=np.int64))) for v in published]
    return [np.asarray(v, dtype=np.int64) for v in published]


def randkey_answer(published, config: Pm1ProtocolConfig, x) -> np.ndarray:
    x = _check_data(x, config.n)
    return block_answers(randkey_vectors(published, config), config.partition, x)


def randkey_decode(keys, answers) -> float:
    return decode(keys, answers)
