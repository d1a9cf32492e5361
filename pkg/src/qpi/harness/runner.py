"""Two-party simulator: one adapter per protocol family, all driven the same way.

An adapter splits a run into the server's query (which may use randomness),
the user's projection vectors and answers, and the server's decode.  The
same split serves single runs, multi-user replay and exhaustive enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any

import numpy as np

from ..algebra.partition import Partition, stirling2
from ..hadamard import FiniteSet
from ..proto_pm1 import (
    Pm1ProtocolConfig,
    ProtocolError,
    block_projections,
    coset_keys,
    coset_query,
    coset_vectors,
    decode,
    randkey_query,
    randkey_vectors,
)
from ..proto_joint import (
    JointConfig,
    joint_decode,
    joint_projections,
    joint_query,
    joint_shift_and_keys,
    perfect_decode,
    perfect_encode,
    perfect_lambdas,
    server_factors,
)
from ..proto_hard import (
    HardConfig,
    hard_decode,
    hard_decompose,
    hard_keys,
    hard_projections,
    hard_query,
    hard_user_expand,
)
from ..proto_hard import query_bits as hard_bits
from ..proto_rou import SQRT3, root, rou_keys, rou_projections, rou_query, symbol_bits, ternary_to_exponents
from ..proto_rou import query_bits as rou_bits
from .transcript import PROTOCOL_IDS, Transcript

TOLERANCE = 1e-9


class StepError(RuntimeError):
    """A protocol step failed; the message names the step."""


@dataclass(frozen=True)
class Setup:
    """Protocol family plus every public parameter."""

    protocol: str
    n: int
    t: int
    m: int = 1
    q: int = 1
    p: int = 2
    A: FiniteSet | None = None

    def __post_init__(self):
        if self.protocol not in PROTOCOL_IDS:
            raise ProtocolError(f"unknown protocol {self.protocol!r}")
        if not 1 <= self.t <= self.n:
            raise ProtocolError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")
        if self.protocol in ("perfect", "hard") and self.A is None:
            raise ProtocolError(f"protocol {self.protocol} needs a set A")
        # parameters a family does not use are pinned, so reports and wire headers are canonical
        if self.protocol in ("perfect", "hard"):
            object.__setattr__(self, "m", self.A.log_size)
        if self.protocol not in ("joint", "perfect", "hard"):
            object.__setattr__(self, "m", 1)
        if self.protocol not in ("joint", "perfect"):
            object.__setattr__(self, "q", 1)
        if self.protocol not in ("rou", "zpm1"):
            object.__setattr__(self, "p", 2)
        if self.protocol == "zpm1":
            object.__setattr__(self, "p", 3)
        # reject bad combinations up front rather than at the first query
        if self.protocol in ("joint", "perfect"):
            JointConfig.make(self.n, self.m, self.t, self.q)
        if self.protocol == "rou" and self.p < 2:
            raise ProtocolError(f"order must be at least 2, got {self.p}")

    @cached_property
    def adapter(self) -> "_Adapter":
        return _ADAPTERS[self.protocol](self)

    @property
    def alphabet_size(self) -> int:
        return self.adapter.alphabet_size

    @property
    def log_alphabet(self) -> float:
        return math.log2(self.alphabet_size)


class _Adapter:
    alphabet_size = 2
    complex_answers = False

    def __init__(self, setup: Setup):
        self.setup = setup

    # server side
    def query(self, w, rng=None, randomness=None) -> tuple[np.ndarray, Any, Any]:
        """(query bits, message the user sees, state the server keeps)."""
        raise NotImplementedError

    def decode(self, state, answers):
        raise NotImplementedError

    # user side
    def projections(self, message) -> np.ndarray:
        raise NotImplementedError

    def answer(self, message, x) -> np.ndarray:
        return self.projections(message) @ x

    # bookkeeping
    def direct(self, w, x):
        return float(np.dot(np.asarray(w, dtype=float), x))

    def symbols(self) -> list:
        """The weight alphabet, one entry per position."""
        raise NotImplementedError

    def weights(self, symbols: tuple):
        return np.array(symbols, dtype=np.int64)

    def randomness(self) -> list:
        """Server randomness outcomes, uniform; [None] for deterministic queries."""
        return [None]

    def sample_weights(self, rng: np.random.Generator):
        alphabet = self.symbols()
        return self.weights(tuple(alphabet[i] for i in rng.integers(0, len(alphabet), size=self.setup.n)))

    def sample_data(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.setup.n)

    @property
    def d_info(self) -> float:
        return float(self.setup.n - self.setup.t)

    @property
    def mi_formula(self) -> float:
        return float(self.setup.n - self.setup.t)

    @property
    def ell_worst(self) -> int:
        return self.setup.t

    @property
    def declared_bits(self) -> int:
        return self.setup.n - self.setup.t


class _Pm1(_Adapter):
    variant = "coset"

    @cached_property
    def config(self) -> Pm1ProtocolConfig:
        return Pm1ProtocolConfig.make(self.setup.n, self.setup.t, self.variant)

    def symbols(self):
        return [1, -1]

    def decode(self, state, answers):
        return decode(state, answers)

    def projections(self, message):
        return block_projections(message, self.config.partition)


class _Coset(_Pm1):
    def query(self, w, rng=None, randomness=None):
        q = coset_query(w, self.config)
        _, keys = coset_keys(w, self.config, q)
        return ((1 - q) // 2).astype(np.uint8), coset_vectors(q, self.config), keys


class _RandKey(_Pm1):
    def query(self, w, rng=None, randomness=None):
        published, keys = randkey_query(w, self.config, rng=rng, keys=randomness)
        flat = np.concatenate([np.asarray(v, dtype=np.int64) for v in published])
        return ((1 - flat) // 2).astype(np.uint8), randkey_vectors(published, self.config), keys


class _Improved(_RandKey):
    variant = "improved_random_key"


class _Basic(_RandKey):
    variant = "random_key"

    def randomness(self):
        return [np.array(k) for k in product((1, -1), repeat=self.setup.t)]

    @property
    def d_info(self):
        return float(self.setup.n)

    @property
    def declared_bits(self):
        return self.setup.n


class _Joint(_Adapter):
    @cached_property
    def config(self) -> JointConfig:
        s = self.setup
        return JointConfig.make(s.n, s.m, s.t, s.q)

    @property
    def alphabet_size(self):
        return 1 << self.setup.m

    def symbols(self):
        return list(product((1, -1), repeat=self.setup.m))

    def weights(self, symbols):
        return np.array(symbols, dtype=np.int64).reshape(self.setup.n, self.setup.m).T

    def signals(self, w) -> np.ndarray:
        return w

    def query(self, w, rng=None, randomness=None):
        W = self.signals(w)
        query = joint_query(W, self.config)
        _, keys = joint_shift_and_keys(W, self.config, query)
        return query.bits(self.config), query, (keys, server_factors(query, self.config))

    def projections(self, message):
        return joint_projections(message, self.config)

    def decode(self, state, answers):
        keys, factors = state
        sizes = [Q.cols for Q in factors]
        parts = np.split(np.asarray(answers, dtype=float), np.cumsum(sizes)[:-1])
        return joint_decode(keys, factors, parts)

    def direct(self, w, x):
        return np.asarray(w, dtype=float) @ x

    @property
    def d_info(self):
        s = self.setup
        return s.m * (s.n - s.t) + math.log2(stirling2(s.n, s.t))

    @property
    def mi_formula(self):
        return float(self.setup.m * (self.setup.n - self.setup.t))

    @property
    def ell_worst(self):
        return self.config.ell_worst

    @property
    def declared_bits(self):
        return self.config.query_bits


class _Perfect(_Joint):
    @cached_property
    def lambdas(self) -> tuple[Fraction, ...]:
        return perfect_lambdas(self.setup.A)

    @property
    def alphabet_size(self):
        return len(self.setup.A)

    def symbols(self):
        return list(self.setup.A.elements)

    def weights(self, symbols):
        return tuple(Fraction(v) for v in symbols)

    def signals(self, w):
        return perfect_encode(w, self.lambdas)

    def decode(self, state, answers):
        return perfect_decode(super().decode(state, answers), self.lambdas)

    def direct(self, w, x):
        return float(np.dot([float(v) for v in w], x))


class _Hard(_Adapter):
    @cached_property
    def config(self) -> HardConfig:
        return HardConfig.make(self.setup.n, self.setup.t, self.setup.A)

    @property
    def alphabet_size(self):
        return len(self.setup.A)

    def symbols(self):
        return list(self.setup.A.elements)

    def weights(self, symbols):
        return tuple(Fraction(v) for v in symbols)

    def query(self, w, rng=None, randomness=None):
        W = hard_decompose(w, self.config)
        query = hard_query(W, self.config)
        return hard_bits(query), query, hard_keys(W, self.config)

    def projections(self, message):
        return hard_projections(hard_user_expand(message, self.config), self.config)

    def decode(self, state, answers):
        return hard_decode(state, self.config, answers)

    def direct(self, w, x):
        return float(np.dot([float(v) for v in w], x))

    @property
    def d_info(self):
        return float(self.config.query_bits)

    @property
    def mi_formula(self):
        return float(self.config.query_bits)

    @property
    def ell_worst(self):
        return self.config.ell

    @property
    def declared_bits(self):
        return self.config.query_bits


class _Rou(_Adapter):
    complex_answers = True

    @cached_property
    def partition(self) -> Partition:
        return Partition.contiguous(self.setup.n, self.setup.t)

    @property
    def alphabet_size(self):
        return self.setup.p

    def symbols(self):
        return list(range(self.setup.p))

    def exponents(self, w):
        return w

    def query(self, w, rng=None, randomness=None):
        k = self.exponents(w)
        published = rou_query(k, self.setup.p, self.partition)
        return rou_bits(published, self.setup.p), published, rou_keys(k, self.setup.p, self.partition)

    def projections(self, message):
        return rou_projections(message, self.setup.p, self.partition)

    def decode(self, state, answers):
        return complex(np.dot(root(self.setup.p, state), np.asarray(answers, dtype=complex)))

    def direct(self, w, x):
        return complex(np.dot(root(self.setup.p, w), x))

    def sample_data(self, rng):
        n = self.setup.n
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)

    @property
    def d_info(self):
        return (self.setup.n - self.setup.t) * math.log2(self.setup.p)

    @property
    def mi_formula(self):
        return self.d_info

    @property
    def declared_bits(self):
        return (self.setup.n - self.setup.t) * symbol_bits(self.setup.p)


class _Zpm1(_Rou):
    complex_answers = False

    @property
    def alphabet_size(self):
        return 3

    def symbols(self):
        return [0, 1, -1]

    def exponents(self, w):
        return ternary_to_exponents(w)

    def projections(self, message):
        # real and imaginary parts of each complex projection, 2t real rows
        V = rou_projections(message, 3, self.partition)
        return np.vstack([np.stack([row.real, row.imag]) for row in V])

    def decode(self, state, answers):
        answers = np.asarray(answers, dtype=float)
        total = np.dot(root(3, state), answers[0::2] + 1j * answers[1::2])
        return 2.0 / SQRT3 * complex(total).imag

    def direct(self, w, x):
        return float(np.dot(np.asarray(w, dtype=float), x))

    def sample_data(self, rng):
        return rng.standard_normal(self.setup.n)

    @property
    def ell_worst(self):
        return 2 * self.setup.t


_ADAPTERS = {
    "coset": _Coset,
    "improved_random_key": _Improved,
    "random_key": _Basic,
    "joint": _Joint,
    "perfect": _Perfect,
    "hard": _Hard,
    "rou": _Rou,
    "zpm1": _Zpm1,
}


def _close(decoded, direct) -> bool:
    decoded, direct = np.asarray(decoded), np.asarray(direct)
    return bool(np.all(np.abs(decoded - direct) <= TOLERANCE * (1 + np.abs(direct))))


def _step(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ProtocolError, ValueError, ArithmeticError) as exc:
        raise StepError(f"{name} step failed: {exc}") from exc


def run_protocol(setup: Setup, w, x, rng: np.random.Generator | None = None) -> Transcript:
    """Server query, user answer, server decode; checks the result against w x^T."""
    adapter = setup.adapter
    bits, message, state = _step("query", adapter.query, w, rng=rng)
    V = _step("answer", adapter.projections, message)
    answers = _step("answer", lambda: V @ np.asarray(x))
    decoded = _step("decode", adapter.decode, state, answers)
    direct = adapter.direct(w, np.asarray(x))
    tr = Transcript.build(setup, bits, answers, V, decoded, direct)
    if len(bits) != adapter.declared_bits:
        raise StepError(f"query step published {len(bits)} bits, expected {adapter.declared_bits}")
    if not _close(decoded, direct):
        raise StepError(f"decode step returned {decoded}, expected {direct}")
    return tr


def run_trials(setup: Setup, trials: int, seed: int) -> list[Transcript]:
    """Independent random (w, x) runs from one seeded generator."""
    rng = np.random.default_rng(seed)
    adapter = setup.adapter
    out = []
    for _ in range(trials):
        w = adapter.sample_weights(rng)
        x = adapter.sample_data(rng)
        out.append(run_protocol(setup, w, x, rng))
    return out


@dataclass
class MultiUserRun:
    query_bits: np.ndarray
    answers: list[np.ndarray] = field(default_factory=list)
    decoded: list = field(default_factory=list)
    direct: list = field(default_factory=list)


def run_multi_user(setup: Setup, w, xs, rng: np.random.Generator | None = None) -> MultiUserRun:
    """Publish one query and serve every user's data with it."""
    adapter = setup.adapter
    bits, message, state = adapter.query(w, rng=rng)
    V = adapter.projections(message)
    run = MultiUserRun(bits)
    for x in xs:
        answers = V @ np.asarray(x)
        run.answers.append(answers)
        run.decoded.append(adapter.decode(state, answers))
        run.direct.append(adapter.direct(w, np.asarray(x)))
        if not _close(run.decoded[-1], run.direct[-1]):
            raise StepError(f"decode step returned {run.decoded[-1]}, expected {run.direct[-1]}")
    return run
