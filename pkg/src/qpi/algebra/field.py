"""Binary field arithmetic in the {+1, -1} representation.

Field-zero is +1 and field-one is -1, so addition in F_2 (and entrywise
addition in F_{2^m}) is the real product.  Bits follow the same convention:
+1 <-> 0 and -1 <-> 1.  An element of F_{2^m} is a length-m vector whose
entry j carries the coefficient of x^j in the polynomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_DEGREE = 16

# Smallest (as integers) irreducible polynomials over F_2, degree 1..16.
IRREDUCIBLE = {
    1: 0x2,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}


class FieldError(ValueError):
    pass


def pm1_to_bit(v: int) -> int:
    return (1 - int(v)) // 2


def bit_to_pm1(b: int) -> int:
    return 1 - 2 * int(b)


def to_bits(values) -> np.ndarray:
    """Map a +-1 array to its 0/1 bit image."""
    return ((1 - np.asarray(values, dtype=np.int64)) // 2).astype(np.uint8)


def from_bits(bits) -> np.ndarray:
    return (1 - 2 * np.asarray(bits, dtype=np.int64)).astype(np.int64)


def f2_add(a: int, b: int) -> int:
    """Addition in F_2 under the +-1 representation (the real product)."""
    _check_pm1(a)
    _check_pm1(b)
    return a * b


def _check_pm1(v: int) -> None:
    if v not in (1, -1):
        raise FieldError(f"expected +1 or -1, got {v!r}")


@dataclass(frozen=True)
class GF2mElem:
    """Element of F_{2^m} stored as m entries in {+1, -1}."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if not self.entries:
            raise FieldError("extension degree must be positive")
        object.__setattr__(self, "entries", tuple(int(v) for v in self.entries))
        for v in self.entries:
            _check_pm1(v)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(pm1_to_bit(v) for v in self.entries)

    def to_int(self) -> int:
        """Polynomial-basis integer; entry j is the coefficient of x^j."""
        return sum(b << j for j, b in enumerate(self.bits))

    @classmethod
    def from_int(cls, value: int, m: int) -> "GF2mElem":
        if not 0 <= value < (1 << m):
            raise FieldError(f"{value} is not an element of F_2^{m}")
        return cls(tuple(bit_to_pm1((value >> j) & 1) for j in range(m)))

    @classmethod
    def zero(cls, m: int) -> "GF2mElem":
        return cls((1,) * m)

    @classmethod
    def one(cls, m: int) -> "GF2mElem":
        return cls((-1,) + (1,) * (m - 1))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def as_elem(value: GF2mElem | Sequence[int]) -> GF2mElem:
    return value if isinstance(value, GF2mElem) else GF2mElem(tuple(value))


def f2m_add(u, v) -> GF2mElem:
    u, v = as_elem(u), as_elem(v)
    if u.m != v.m:
        raise FieldError(f"degree mismatch: {u.m} != {v.m}")
    return GF2mElem(tuple(a * b for a, b in zip(u.entries, v.entries)))


def _clmul_mod(a: int, b: int, m: int) -> int:
    poly = IRREDUCIBLE[m]
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return result


def f2m_mul(u, v) -> GF2mElem:
    """Product in F_{2^m} modulo the tabulated irreducible polynomial."""
    u, v = as_elem(u), as_elem(v)
    if u.m != v.m:
        raise FieldError(f"degree mismatch: {u.m} != {v.m}")
    if u.m > MAX_DEGREE:
        raise FieldError(f"unsupported extension degree {u.m} > {MAX_DEGREE}")
    return GF2mElem.from_int(_clmul_mod(u.to_int(), v.to_int(), u.m), u.m)


def columns_to_elems(matrix) -> list[GF2mElem]:
    """Columns of an m x n +-1 matrix as field elements."""
    matrix = np.asarray(matrix)
    return [GF2mElem(tuple(int(v) for v in matrix[:, j])) for j in range(matrix.shape[1])]


def elems_to_columns(elems: Iterable) -> np.ndarray:
    cols = [as_elem(e).entries for e in elems]
    return np.array(cols, dtype=np.int64).T
