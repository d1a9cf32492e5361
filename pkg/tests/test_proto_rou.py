import cmath
import math

import numpy as np
import pytest

from qpi.algebra.partition import Partition, partition_unrank, stirling2
from qpi.proto_pm1 import Pm1ProtocolConfig, randkey_query
from qpi.proto_rou import (
    ProtocolError,
    RouElem,
    query_bits,
    root,
    rou_answer,
    rou_decode,
    rou_keys,
    rou_query,
    symbol_bits,
    ternary_to_exponents,
    zpm1_roundtrip,
)


def test_roots_are_exact_on_quarter_turns():
    assert [root(4, k) for k in range(4)] == [1, 1j, -1, -1j]
    assert root(2, 1) == -1
    assert abs(root(3, 1) - cmath.exp(2j * math.pi / 3)) < 1e-15
    assert (RouElem(5, 3) * RouElem(5, 4)).k == 2
    assert (RouElem(6, 1) * RouElem(6, 1).inverse()).k == 0


@pytest.mark.parametrize("p,bits", [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3)])
def test_symbol_bits(p, bits):
    assert symbol_bits(p) == bits


def test_p4_hand_trace():
    P = Partition.contiguous(2, 1)
    k = np.array([1, 2])  # w = [i, -1]
    published = rou_query(k, 4, P)
    assert [root(4, v).tolist() for v in published] == [[1j]]
    answers = rou_answer(published, 4, P, [1.0, 2.0])
    assert answers.tolist() == [1 + 2j]
    assert rou_decode(rou_keys(k, 4, P), 4, answers) == -2 + 1j


def test_singletons_publish_nothing():
    P = Partition.contiguous(3, 3)
    assert query_bits(rou_query([1, 2, 3], 4, P), 4).size == 0


def test_all_ones_block_sums():
    P = Partition.contiguous(4, 2)
    published = rou_query([0, 0, 0, 0], 5, P)
    assert np.allclose(rou_answer(published, 5, P, [1.0, 2.0, 3.0, 4.0]), [3.0, 7.0])
    assert np.allclose(rou_answer(published, 5, P, np.zeros(4)), 0)


def test_p2_matches_improved_random_key(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        t = int(rng.integers(1, n + 1))
        P = partition_unrank(int(rng.integers(stirling2(n, t))), n, t)
        w = rng.choice([1, -1], n)
        k = (1 - w) // 2
        pm1_published, pm1_keys = randkey_query(w, Pm1ProtocolConfig(n, P, "improved_random_key"))
        rou_published = rou_query(k, 2, P)
        pm1_bits = np.concatenate([(1 - v) // 2 for v in pm1_published]).astype(np.uint8) if n > t else np.zeros(0, np.uint8)
        assert np.array_equal(query_bits(rou_published, 2), pm1_bits)
        assert np.array_equal(root(2, rou_keys(k, 2, P)), pm1_keys)


@pytest.mark.parametrize("p", [2, 3, 4, 8])
def test_random_decode(p, rng):
    for _ in range(500):
        n = int(rng.integers(1, 9))
        t = int(rng.integers(1, n + 1))
        P = partition_unrank(int(rng.integers(stirling2(n, t))), n, t)
        k = rng.integers(0, p, n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        published = rou_query(k, p, P)
        assert query_bits(published, p).size == (n - t) * symbol_bits(p)
        got = rou_decode(rou_keys(k, p, P), p, rou_answer(published, p, P, x))
        want = np.dot(np.exp(2j * np.pi * k / p), x)
        assert abs(got - want) <= 1e-9 * (1 + abs(want))


def test_wire_is_msb_first():
    assert query_bits([np.array([1, 6])], 8).tolist() == [0, 0, 1, 1, 1, 0]


def test_ternary_hand_trace():
    value, answers = zpm1_roundtrip([0, 1, -1], Partition.contiguous(3, 1), [5.0, 1.0, 2.0])
    assert abs(answers[0] - (3.5 - math.sqrt(3) / 2 * 1j)) < 1e-12
    assert abs(value - (-1.0)) < 1e-12


def test_ternary_random(rng):
    for _ in range(300):
        n = int(rng.integers(1, 9))
        t = int(rng.integers(1, n + 1))
        w = rng.choice([0, 1, -1], n)
        x = rng.standard_normal(n)
        value, answers = zpm1_roundtrip(w, Partition.contiguous(n, t), x)
        assert answers.size == t
        assert abs(value - w @ x) <= 1e-9 * (1 + abs(w @ x))
    assert zpm1_roundtrip([0, 0, 0], Partition.contiguous(3, 2), rng.standard_normal(3))[0] == pytest.approx(0, abs=1e-12)


def test_validation():
    with pytest.raises(ProtocolError):
        ternary_to_exponents([2])
    with pytest.raises(ProtocolError):
        rou_query([0, 1], 4, Partition.contiguous(3, 1))
    with pytest.raises(ProtocolError):
        RouElem(1, 0)
