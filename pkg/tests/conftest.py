"""Shared oracles and strategies.

The oracles here deliberately avoid the package's own solvers: ranks come
from sympy, field products from a shift-and-add over Python ints.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import strategies as st

from qpi.hadamard import FiniteSet, classify_set


def sympy_rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return sympy.Matrix(M.tolist()).rank()


def poly_mul_mod(a: int, b: int, modulus: int) -> int:
    """Carry-less product of two bit polynomials reduced by ``modulus``."""
    prod = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            prod ^= a << i
    deg = modulus.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= modulus << (prod.bit_length() - 1 - deg)
    return prod


def pm1_vectors(n: int):
    return st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n).map(np.array)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_rational_set(rng: np.random.Generator, size: int, denominators=(7, 11, 13, 17, 19, 23, 29, 31)):
    """Distinct rationals with assorted prime denominators; generic enough to be hard."""
    while True:
        vals = {Fraction(int(rng.integers(-20000, 20000)), int(rng.choice(denominators))) for _ in range(size)}
        if len(vals) == size:
            return FiniteSet.of(vals)


def random_hard_set(rng: np.random.Generator, size: int):
    while True:
        A = random_rational_set(rng, size)
        if classify_set(A).kind == "hard":
            return A
