import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpi.algebra.partition import Partition, partition_unrank, stirling2
from qpi.proto_pm1 import (
    Pm1ProtocolConfig,
    ProtocolError,
    block_projections,
    coset_answer,
    coset_decode,
    coset_keys,
    coset_query,
    coset_vectors,
    randkey_answer,
    randkey_decode,
    randkey_query,
)


def config(n, t, variant="coset", blocks=None):
    return Pm1ProtocolConfig.make(n, t, variant, None if blocks is None else Partition(n, blocks))


def test_coset_query_examples():
    assert coset_query([1, -1, 1], config(3, 3)).size == 0
    assert coset_query([1] * 5, config(5, 2)).tolist() == [1, 1, 1]
    assert coset_query([-1, -1, 1], config(3, 2, blocks=((0, 1), (2,)))).tolist() == [1]


def test_coset_two_element_trace():
    c = config(2, 1)
    w = np.array([-1, 1])
    q = coset_query(w, c)
    u, keys = coset_keys(w, c, q)
    assert q.tolist() == [-1] and u.tolist() == [-1, 1] and keys.tolist() == [1]
    answers = coset_answer(q, c, [2.0, 3.0])
    assert answers.tolist() == [1.0]
    assert coset_decode(keys, answers) == 1.0


def test_coset_answers_trivial_cases():
    c = config(4, 2)
    q = coset_query([1, 1, 1, 1], c)
    assert coset_answer(q, c, np.zeros(4)).tolist() == [0, 0]
    assert coset_answer(q, c, [1.0, 2.0, 3.0, 4.0]).tolist() == [3.0, 7.0]
    assert coset_decode([1, 1], [3.0, 7.0]) == 10.0


@given(
    st.integers(1, 8).flatmap(
        lambda n: st.tuples(st.just(n), st.integers(1, n), st.randoms(use_true_random=False))
    )
)
@settings(max_examples=200)
def test_coset_keys_relate_shift_and_weights(args):
    n, t, r = args
    c = Pm1ProtocolConfig(n, partition_unrank(r.randrange(stirling2(n, t)), n, t))
    w = np.array([r.choice((1, -1)) for _ in range(n)])
    u, keys = coset_keys(w, c, coset_query(w, c))
    for k, block in zip(keys, c.partition.blocks):
        assert np.array_equal(u[list(block)], k * w[list(block)])


def test_improved_publication_examples():
    published, _ = randkey_query([1, -1, 1], config(3, 3, "improved_random_key"))
    assert all(v.size == 0 for v in published)
    published, keys = randkey_query([1, 1, 1, 1], config(4, 1, "improved_random_key"))
    assert [v.tolist() for v in published] == [[1, 1, 1]] and keys.tolist() == [1]
    c = config(3, 2, "improved_random_key", ((0, 1), (2,)))
    published, keys = randkey_query([-1, 1, -1], c)
    assert [v.tolist() for v in published] == [[-1], []]
    assert sum(v.size for v in published) == c.query_bits == 1


def test_improved_hand_trace():
    c = config(3, 2, "improved_random_key", ((0, 1), (2,)))
    published, keys = randkey_query([-1, 1, -1], c)
    answers = randkey_answer(published, c, [1.0, 2.0, 4.0])
    assert answers.tolist() == [-1.0, 4.0] and keys.tolist() == [-1, -1]
    assert randkey_decode(keys, answers) == -3.0
    assert randkey_decode(keys, randkey_answer(published, c, np.zeros(3))) == 0.0


def test_basic_matches_improved_when_keys_are_heads():
    w = np.array([-1, 1, 1, -1, 1])
    basic = config(5, 2, "random_key")
    improved = config(5, 2, "improved_random_key")
    heads = w[list(basic.partition.heads)]
    pub_b, keys_b = randkey_query(w, basic, keys=heads)
    pub_i, keys_i = randkey_query(w, improved)
    assert np.array_equal(keys_b, keys_i)
    assert all(b[0] == 1 and np.array_equal(b[1:], i) for b, i in zip(pub_b, pub_i))
    x = np.arange(5.0)
    assert np.allclose(randkey_answer(pub_b, basic, x), randkey_answer(pub_i, improved, x))


def test_basic_needs_randomness():
    with pytest.raises(ProtocolError):
        randkey_query([1, 1], config(2, 1, "random_key"))


@pytest.mark.parametrize("variant", ["coset", "improved_random_key", "random_key"])
def test_random_decode(variant, rng):
    for _ in range(300):
        n = int(rng.integers(1, 11))
        t = int(rng.integers(1, n + 1))
        c = Pm1ProtocolConfig(n, partition_unrank(int(rng.integers(stirling2(n, t))), n, t), variant)
        w = rng.choice([1, -1], n)
        x = rng.standard_normal(n)
        if variant == "coset":
            q = coset_query(w, c)
            _, keys = coset_keys(w, c, q)
            got = coset_decode(keys, coset_answer(q, c, x))
        else:
            published, keys = randkey_query(w, c, rng)
            got = randkey_decode(keys, randkey_answer(published, c, x))
        want = float(w @ x)
        assert abs(got - want) <= 1e-9 * (1 + abs(want))


def test_projections_are_disjoint_blocks():
    c = config(6, 3)
    q = coset_query([1, -1, -1, 1, 1, -1], c)
    V = block_projections(coset_vectors(q, c), c.partition)
    assert V.shape == (3, 6)
    assert (np.count_nonzero(V, axis=0) == 1).all()


def test_config_validation():
    with pytest.raises(ProtocolError):
        Pm1ProtocolConfig.make(3, 2, "bogus")
    with pytest.raises(ProtocolError):
        coset_query([1, 0, 1], config(3, 1))
    with pytest.raises(ProtocolError):
        coset_answer(coset_query([1, 1, 1], config(3, 1)), config(3, 1), [1.0, 2.0])
    assert config(7, 3, "random_key").query_bits == 7
    assert config(7, 3, "improved_random_key").query_bits == 4
