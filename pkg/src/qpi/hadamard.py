"""Sylvester Hadamard matrices, coefficient complexity and dictionaries.

Row and column indices are 0-based: row i of H_{2^m} has entry
(-1)^popcount(i & j) in column j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

import numpy as np

from .algebra.linalg import solve_vector

MAX_ORDER = 12


class HadamardError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _sylvester(m: int) -> np.ndarray:
    H = np.ones((1, 1), dtype=np.int64)
    for _ in range(m):
        H = np.block([[H, H], [H, -H]])
    H.setflags(write=False)
    return H


def sylvester(m: int) -> np.ndarray:
    """H_{2^m} by the recursion H_{2k} = [[H_k, H_k], [H_k, -H_k]]."""
    if not 0 <= m <= MAX_ORDER:
        raise HadamardError(f"order exponent must be in [0, {MAX_ORDER}], got {m}")
    return _sylvester(m)


def hadamard_entry(i: int, j: int, m: int) -> int:
    size = 1 << m
    if not (0 <= i < size and 0 <= j < size):
        raise HadamardError(f"({i}, {j}) outside H_{size}")
    return -1 if bin(i & j).count("1") & 1 else 1


def independent_columns(m: int) -> tuple[int, ...]:
    """m columns of H_{2^m} whose restriction lists every vector of {+-1}^m once.

    L(1) = {1}; L(k+1) = {2^k} + {2^k + j : j in L(k)}.
    """
    if m < 1:
        raise HadamardError("need m >= 1")
    cols = [1]
    for k in range(1, m):
        cols = [1 << k] + [(1 << k) + j for j in cols]
    return tuple(sorted(cols))


@lru_cache(maxsize=None)
def _row_lookup(m: int) -> dict[tuple[int, ...], int]:
    H = sylvester(m)
    L = list(independent_columns(m))
    return {tuple(int(v) for v in H[i, L]): i for i in range(1 << m)}


def row_from_subvector(vals: Sequence[int], m: int) -> tuple[int, np.ndarray]:
    """The unique row of H_{2^m} agreeing with ``vals`` on the independent columns."""
    key = tuple(int(v) for v in vals)
    if len(key) != m:
        raise HadamardError(f"need {m} values, got {len(key)}")
    i = _row_lookup(m)[key]
    return i, sylvester(m)[i]


@dataclass(frozen=True)
class FiniteSet:
    """Finite set of exact rationals, stored in increasing order."""

    elements: tuple[Fraction, ...]

    def __post_init__(self):
        elems = tuple(sorted(Fraction(e) for e in self.elements))
        if len(set(elems)) != len(elems):
            raise HadamardError("repeated element")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, values: Iterable) -> "FiniteSet":
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "FiniteSet":
        """Comma-separated rationals such as ``-3,-1,1,3`` or ``-1/2,0,1/2,1``."""
        try:
            return cls.of(Fraction(tok.strip()) for tok in text.split(",") if tok.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise HadamardError(f"cannot parse set {text!r}: {exc}") from None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, value) -> int:
        return self.elements.index(Fraction(value))

    @property
    def total(self) -> Fraction:
        return sum(self.elements, Fraction(0))

    @property
    def log_size(self) -> int:
        """m with |A| = 2^m; raises unless the size is a power of two."""
        k = len(self.elements)
        if k < 2 or k & (k - 1):
            raise HadamardError(f"set size {k} is not a power of two >= 2")
        return k.bit_length() - 1

    def __str__(self):
        return ",".join(str(e) for e in self.elements)


@dataclass(frozen=True)
class Dictionary:
    matrix: np.ndarray
    coefficients: tuple[Fraction, ...]

    def reproduces(self, A: FiniteSet) -> bool:
        got = [sum((int(d) * c for d, c in zip(row, self.coefficients)), Fraction(0)) for row in self.matrix]
        has_ones = bool((self.matrix == 1).all(axis=0).any())
        return has_ones and tuple(got) == A.elements


def coefficient_vector(A: FiniteSet) -> tuple[tuple[Fraction, ...], int]:
    """lambda = vec(A)^T H / 2^m and gamma_A, the count of nonzero lambda_i, i >= 1."""
    m = A.log_size
    H = sylvester(m)
    scale = 1 << m
    lam = tuple(sum((a * int(h) for a, h in zip(A.elements, H[:, j])), Fraction(0)) / scale for j in range(scale))
    gamma = sum(1 for v in lam[1:] if v != 0)
    return lam, gamma


def hadamard_dictionary(A: FiniteSet) -> Dictionary:
    lam, _ = coefficient_vector(A)
    return Dictionary(sylvester(A.log_size), lam)


@dataclass(frozen=True)
class ComplexityCertificate:
    theta: int
    lambdas: tuple[Fraction, ...]  # lambda_0, lambda_1, ..., lambda_theta
    signs: dict

    def verify(self, A: FiniteSet) -> bool:
        if len(self.lambdas) != self.theta + 1 or set(self.signs) != set(A.elements):
            return False
        for a, eps in self.signs.items():
            if len(eps) != self.theta:
                return False
            if self.lambdas[0] + sum(e * lam for e, lam in zip(eps, self.lambdas[1:])) != a:
                return False
        return True


def _subset_sums(lam: Sequence[Fraction]) -> dict[Fraction, list[int]]:
    """Every subset sum of ``lam`` mapped to all index masks producing it."""
    sums: dict[Fraction, list[int]] = {Fraction(0): [0]}
    for i, v in enumerate(lam):
        for s, masks in [(s, tuple(masks)) for s, masks in sums.items()]:
            sums.setdefault(s + v, []).extend(mask | (1 << i) for mask in masks)
    return sums


def _match(options: list[list[int]], taken: int) -> list[int] | None:
    """Pick one mask per option list, all distinct and outside ``taken``."""
    if not options:
        return []
    head, *tail = options
    for mask in head:
        if mask and not (taken >> mask) & 1:
            rest = _match(tail, taken | (1 << mask))
            if rest is not None:
                return [mask] + rest
    return None


# largest |det| of a k x k 0/1 matrix, k = 0..6
_MAX_DET01 = (1, 1, 1, 2, 3, 5, 9)


def _relation_rank(values: Sequence[Fraction], bound: int) -> int:
    """Rank of the integer relations c.values = 0 with every |c_i| <= bound.

    Meet in the middle: coefficient vectors on the first half are bucketed by
    their partial sum and matched against negated sums of the second half.
    """
    den = math.lcm(*(v.denominator for v in values))
    ints = [int(v * den) for v in values]
    k = len(ints)
    h = k // 2
    coeffs = range(-bound, bound + 1)
    left: dict[int, list[tuple[int, ...]]] = {}
    for c in product(coeffs, repeat=h):
        left.setdefault(sum(a * b for a, b in zip(c, ints[:h])), []).append(c)
    basis: list[tuple[int, list[int]]] = []
    for c2 in product(coeffs, repeat=k - h):
        s = sum(a * b for a, b in zip(c2, ints[h:]))
        for c1 in left.get(-s, ()):
            row = _int_reduce(list(c1 + c2), basis)
            pivot = next((j for j, x in enumerate(row) if x), None)
            if pivot is not None:
                basis.append((pivot, row))
                if len(basis) == k - 1:
                    return k - 1
    return len(basis)


def _int_reduce(row: list[int], basis: list[tuple[int, list[int]]]) -> list[int]:
    for pivot, brow in basis:
        if row[pivot]:
            a, b = brow[pivot], row[pivot]
            row = [a * x - b * y for x, y in zip(row, brow)]
    return row


class _Search:
    """Depth-first search for subset incidences T_a with sum_{i in T_a} lambda_i = d_a.

    Pinning the smallest element to the all-(+1) sign pattern turns
    a = lambda_0 + sum eps_i lambda_i into d_a = (a_min - a)/2 = sum_{i in T_a}
    lambda_i, T_a being the coordinates where eps_i = -1.  Coordinates never
    used so far are interchangeable, so a new incidence may only extend into
    them as a prefix.
    """

    def __init__(self, d: list[Fraction], theta: int, budget: int):
        self.d = d
        self.theta = theta
        self.budget = budget
        self.nodes = 0

    def run(self):
        return self._dfs(0, 0, [], [], 0)

    def _candidates(self, used: int, taken: int):
        for fresh in range(self.theta - used + 1):
            tail = ((1 << fresh) - 1) << used
            for low in range(1 << used):
                mask = low | tail
                if mask and not (taken >> mask) & 1:
                    yield mask, used + fresh

    def _dfs(self, k, used, echelon, masks, taken):
        if k == len(self.d):
            return list(masks)
        if len(echelon) == self.theta:
            # lambda fully determined: remaining d's must be subset sums
            lam = solve_vector([row for row, _ in echelon], [rhs for _, rhs in echelon])
            sums = _subset_sums(lam)
            rest = _match([sums.get(value, []) for value in self.d[k:]], taken)
            return None if rest is None else list(masks) + rest
        for mask, new_used in self._candidates(used, taken):
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(f"complexity search exceeded {self.budget} nodes")
            row = [Fraction((mask >> i) & 1) for i in range(self.theta)]
            reduced = _reduce(row, self.d[k], echelon)
            if reduced is None:
                continue
            next_echelon = echelon if reduced is True else echelon + [reduced]
            found = self._dfs(k + 1, new_used, next_echelon, masks + [mask], taken | (1 << mask))
            if found is not None:
                return found
        return None


def _reduce(row, rhs, echelon):
    """Reduce (row, rhs) against echelon rows: None if inconsistent, True if redundant."""
    row = list(row)
    for erow, erhs in echelon:
        p = next(i for i, v in enumerate(erow) if v != 0)
        if row[p] != 0:
            f = row[p] / erow[p]
            row = [x - f * y for x, y in zip(row, erow)]
            rhs = rhs - f * erhs
    if any(row):
        return (row, rhs)
    return True if rhs == 0 else None


def _certificate(A: FiniteSet, theta: int, masks: list[int]) -> ComplexityCertificate:
    base = A.elements[0]
    others = A.elements[1:]
    rows = [[Fraction((mask >> i) & 1) for i in range(theta)] for mask in masks]
    lam = solve_vector(rows, [(base - a) / 2 for a in others])
    lam0 = base - sum(lam, Fraction(0))
    signs = {base: (1,) * theta}
    for a, mask in zip(others, masks):
        signs[a] = tuple(-1 if (mask >> i) & 1 else 1 for i in range(theta))
    return ComplexityCertificate(theta, (lam0, *lam), signs)


def coefficient_complexity(A: FiniteSet, budget: int = 2_000_000) -> ComplexityCertificate:
    """Smallest theta with A inside lambda_0 + sum_{i<=theta} lambda_i {1, -1}, with witness.

    theta = |A| - 1 always works (one coordinate per non-minimal element), so
    the search only runs for ceil(log2 |A|) <= theta < |A| - 1.  Sets whose
    differences satisfy few small integer relations are settled without
    search; otherwise a depth-first search over incidences runs under
    ``budget`` nodes and raises :class:`BudgetExceeded` past it.
    """
    k = len(A)
    if not 2 <= k <= 8:
        raise HadamardError(f"complexity search supports 2 <= |A| <= 8, got {k}")
    base = A.elements[0]
    d = [(base - a) / 2 for a in A.elements[1:]]
    ranks: dict[int, int] = {}
    for theta in range(math.ceil(math.log2(k)), k - 1):
        # a minimal witness has a full-rank incidence, whose left kernel gives
        # k-1-theta independent relations on d with coefficients bounded by
        # the largest theta x theta 0/1 minor
        bound = _MAX_DET01[theta]
        if bound not in ranks:
            ranks[bound] = _relation_rank(d, bound)
        if ranks[bound] < k - 1 - theta:
            continue
        masks = _Search(d, theta, budget).run()
        if masks is not None:
            return _certificate(A, theta, masks)
    return _certificate(A, k - 1, [1 << i for i in range(k - 1)])


@dataclass(frozen=True)
class SetClass:
    kind: str  # "perfect" | "hard" | "neither"
    certificate: ComplexityCertificate
    perfect_lambdas: tuple[Fraction, ...] | None = None


def classify_set(A: FiniteSet, budget: int = 2_000_000) -> SetClass:
    m = A.log_size
    cert = coefficient_complexity(A, budget)
    if cert.theta == m and A.total == 0:
        return SetClass("perfect", cert, cert.lambdas[1:])
    if cert.theta == len(A) - 1:
        return SetClass("hard", cert)
    return SetClass("neither", cert)


def brute_force_fits(A: FiniteSet, theta: int) -> bool:
    """Independent check: try every injective sign-pattern assignment (tiny sets only)."""
    patterns = [tuple(1 - 2 * ((p >> i) & 1) for i in range(theta)) for p in range(1 << theta)]
    elems = A.elements
    for chosen in combinations(patterns, len(elems)):
        for perm in permutations(chosen):
            rows = [[1, *eps] for eps in perm]
            if solve_vector(rows, list(elems)) is not None:
                return True
    return False
