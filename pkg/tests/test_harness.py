import csv
import io
import json
import math
from collections import Counter
from itertools import product

import numpy as np
import pytest

from qpi.algebra.partition import Partition
from qpi.hadamard import BudgetExceeded, FiniteSet
from qpi.harness import (
    Setup,
    StepError,
    Transcript,
    TranscriptError,
    emit_report,
    enumeration_size,
    joint_cost_bound,
    mutual_information,
    privacy_report,
    publication_cost,
    run_multi_user,
    run_protocol,
    run_trials,
    user_privacy,
)
from qpi.harness.cli import main
from qpi.harness.examples import verify_examples
from qpi.harness.privacy import DEFAULT_BUDGET

A8 = FiniteSet.parse("-9173/11,-2851/7,-604/13,137/3,1289/17,3391/5,7717/19,12011/23")
W9 = np.array(
    [
        [-1, 1, -1, 1, 1, -1, -1, -1, 1],
        [-1, 1, 1, 1, -1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, -1, 1, -1, -1],
        [1, 1, -1, -1, -1, 1, 1, -1, -1],
    ]
)
ALL_SETUPS = [
    Setup("coset", 5, 2),
    Setup("improved_random_key", 5, 2),
    Setup("random_key", 5, 2),
    Setup("joint", 4, 2, m=2, q=2),
    Setup("perfect", 4, 2, q=2, A=FiniteSet.parse("-3,-1,1,3")),
    Setup("hard", 4, 2, A=FiniteSet.parse("-2,0,1,2")),
    Setup("rou", 5, 2, p=5),
    Setup("zpm1", 5, 2),
]


def entropy(counter):
    total = sum(counter.values())
    return -sum(c / total * math.log2(c / total) for c in counter.values())


def coset_mi_oracle(n, t):
    # the query is a function of w, so I(W;Q) = H(Q); it is the block-internal consecutive products
    blocks = Partition.contiguous(n, t).blocks
    counts = Counter(
        tuple(w[a] * w[b] for blk in blocks for a, b in zip(blk, blk[1:])) for w in product((1, -1), repeat=n)
    )
    return entropy(counts)


@pytest.mark.parametrize("n,t", [(3, 2), (4, 1), (4, 4), (5, 3), (6, 2)])
def test_coset_mi_matches_oracle(n, t):
    assert mutual_information(Setup("coset", n, t)) == pytest.approx(coset_mi_oracle(n, t), abs=1e-12)
    assert coset_mi_oracle(n, t) == pytest.approx(n - t, abs=1e-12)


@pytest.mark.parametrize("protocol", ["coset", "improved_random_key", "random_key", "rou", "zpm1"])
def test_mi_vanishes_without_query(protocol):
    assert mutual_information(Setup(protocol, 3, 3)) == 0.0


def test_joint_mi_small():
    assert mutual_information(Setup("joint", 2, 1, m=2, q=1)) == pytest.approx(2.0, abs=1e-12)


def test_basic_random_key_hides_everything_but_the_pattern():
    # uniform keys per block: the query still reveals n - t bits
    assert mutual_information(Setup("random_key", 4, 2)) == pytest.approx(2.0, abs=1e-12)


def test_mi_budget():
    assert DEFAULT_BUDGET == 1 << 24
    assert enumeration_size(Setup("coset", 6, 2)) == 64
    with pytest.raises(BudgetExceeded):
        mutual_information(Setup("coset", 6, 2), budget=10)


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: s.protocol)
def test_every_protocol_runs(setup):
    for tr in run_trials(setup, 20, seed=3):
        assert tr.d_bits == setup.adapter.declared_bits
        assert np.allclose(tr.decoded, tr.direct, rtol=1e-9, atol=1e-9)


def test_coset_transcript(rng):
    w, x = rng.choice([1, -1], 4), rng.standard_normal(4)
    tr = run_protocol(Setup("coset", 4, 2), w, x)
    assert tr.d_bits == 2 and tr.answers.size == 2
    assert tr.decoded == pytest.approx(w @ x, rel=1e-9)
    assert user_privacy(tr) == (2, 2)


def test_joint_transcript_worked_example(rng):
    x = rng.standard_normal(9)
    tr = run_protocol(Setup("joint", 9, 5, m=4, q=4), W9, x)
    assert tr.d_bits == 29
    assert np.allclose(tr.decoded, W9 @ x, rtol=1e-9, atol=1e-9) and len(tr.decoded) == 4


def test_hard_transcript_query_section(rng):
    w = tuple(A8.elements[k] for k in (1, 2, 3, 4))
    tr = run_protocol(Setup("hard", 4, 1, A=A8), w, rng.standard_normal(4))
    assert tr.query_bits.tolist() == [0, 0, 1, 1, 1, 1, 0, 1, 0]
    assert tr.to_bytes()[24:26] == bytes([0b00111101, 0])
    count, r = user_privacy(tr)
    assert count == 8 and r <= 8


def test_user_privacy_joint_example(rng):
    tr = run_protocol(Setup("joint", 2, 1, m=2, q=1), np.array([[1, -1], [1, -1]]), rng.standard_normal(2))
    assert user_privacy(tr) == (1, 1)


def test_publication_costs():
    s = Setup("improved_random_key", 7, 3)
    assert publication_cost(run_trials(s, 1, 0)[0], s) == (4, 4.0)
    s = Setup("rou", 4, 2, p=3)
    d_bits, d_info = publication_cost(run_trials(s, 1, 0)[0], s)
    assert d_bits == 4 and d_info == pytest.approx(2 * math.log2(3))
    assert 29 <= joint_cost_bound(9, 5, 4)


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: s.protocol)
def test_wire_round_trip(setup):
    tr = run_trials(setup, 1, seed=11)[0]
    data = tr.to_bytes()
    back = Transcript.from_bytes(data)
    assert back.same_wire(tr)
    assert (back.protocol, back.n, back.t, back.m, back.q, back.p) == (tr.protocol, tr.n, tr.t, tr.m, tr.q, tr.p)
    assert np.array_equal(back.query_bits, tr.query_bits)
    assert np.array_equal(back.answers, tr.answers)
    assert data[:4] == b"QPI1"


def test_wire_rejects_damage():
    data = run_trials(Setup("coset", 4, 2), 1, seed=0)[0].to_bytes()
    with pytest.raises(TranscriptError):
        Transcript.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(TranscriptError):
        Transcript.from_bytes(data[:-1])
    with pytest.raises(TranscriptError):
        Transcript.from_bytes(data[:10])


@pytest.mark.parametrize("setup", ALL_SETUPS, ids=lambda s: s.protocol)
def test_determinism(setup):
    a = [t.to_bytes() for t in run_trials(setup, 10, seed=5)]
    b = [t.to_bytes() for t in run_trials(setup, 10, seed=5)]
    assert a == b
    assert emit_report([privacy_report(setup)]) == emit_report([privacy_report(setup)])


def test_multi_user_shares_one_query(rng):
    setup = Setup("random_key", 6, 3)
    w = rng.choice([1, -1], 6)
    xs = rng.standard_normal((5, 6))
    run = run_multi_user(setup, w, xs, np.random.default_rng(0))
    assert len(run.answers) == 5 and run.query_bits.size == 6
    assert np.allclose(run.decoded, xs @ w)


def test_step_errors_name_the_step():
    with pytest.raises(StepError, match="query"):
        run_protocol(Setup("coset", 3, 1), np.array([1, 2, 1]), np.zeros(3))


def test_tradeoff_checks():
    c = privacy_report(Setup("coset", 5, 3)).check("tradeoff")
    assert c.satisfied and c.attained and c.margin == pytest.approx(0, abs=1e-12)
    h = privacy_report(Setup("hard", 3, 1, A=FiniteSet.parse("-2,0,1,2"))).check("tradeoff")
    assert h.satisfied and not h.attained and h.margin > 0


def test_report_fields_and_formats():
    reports = [privacy_report(Setup("coset", 4, 2)), privacy_report(Setup("rou", 3, 1, p=3))]
    doc = json.loads(emit_report(reports, "json"))
    assert [r["protocol"] for r in doc["reports"]] == ["coset", "rou"]
    rec = doc["reports"][0]
    for key in ("protocol", "n", "t", "d_bits", "ell", "mi_bits", "checks"):
        assert key in rec
    rows = list(csv.DictReader(io.StringIO(emit_report(reports, "csv"))))
    for rec, row in zip(doc["reports"], rows):
        for key in ("n", "t", "d_bits", "d_info", "ell", "mi_bits", "entropyH"):
            assert float(row[key]) == float(rec[key])
        assert row["passed"] == str(rec["passed"])
        assert len(row["checks"].split(";")) == len(rec["checks"])


def test_empty_report_documents():
    assert json.loads(emit_report([], "json")) == {"reports": []}
    header = emit_report([], "csv")
    assert header.startswith("protocol,n,t,") and header.count("\n") == 1
    with pytest.raises(ValueError):
        emit_report([], "xml")


def test_parameters_unused_by_a_family_are_pinned():
    s = Setup("coset", 4, 2, m=3, q=2, p=7)
    assert (s.m, s.q, s.p) == (1, 1, 2)
    assert Setup("zpm1", 4, 2, p=5).p == 3
    assert Setup("hard", 4, 2, m=5, A=A8).m == 3


def test_verify_examples_reproduce():
    results = verify_examples(seed=0)
    assert all(r.status != "fail" for r in results)
    assert sum(r.status == "erratum" for r in results) == 2


@pytest.mark.parametrize(
    "argv,code",
    [
        (["pm1-coset", "--n", "4", "--t", "2", "--trials", "5"], 0),
        (["pm1-randkey", "--basic", "--n", "4", "--t", "2", "--trials", "5"], 0),
        (["rou", "--n", "3", "--t", "1", "--p", "4", "--trials", "5"], 0),
        (["zpm1", "--n", "3", "--t", "1", "--trials", "5"], 0),
        (["hard", "--n", "3", "--t", "1", "--trials", "5"], 0),
        (["perfect", "--n", "3", "--t", "2", "--q", "2", "--trials", "5", "--skip-mi"], 0),
        (["complexity", "--set=-3,-1,1,3"], 0),
        (["joint", "--n", "3", "--t", "2", "--m", "2", "--q", "2", "--trials", "5"], 1),
        (["joint", "--n", "3", "--t", "1", "--q", "2"], 2),
        (["pm1-coset", "--t", "0"], 2),
        (["complexity"], 2),
        (["no-such-command"], 2),
        (["pm1-coset", "--n", "6", "--t", "2", "--budget", "10"], 3),
        (["complexity", "--set=1,2,4,8,16,32,64,128", "--budget", "10"], 3),
    ],
)
def test_cli_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_cli_outputs(tmp_path, capsys):
    path = tmp_path / "t.bin"
    assert main(["pm1-coset", "--n", "4", "--t", "2", "--trials", "3", "--transcript", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["reports"][0]["mi_bits"] == 2
    assert Transcript.from_bytes(path.read_bytes()).protocol == "coset"
    assert main(["privacy-scan", "--protocol", "coset", "--n", "3", "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 4
    assert main(["complexity", "--set=-2,0,1,2"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["theta"] == 3 and rec["kind"] == "hard" and rec["certificate_ok"]
    assert main(["verify-paper-examples"]) == 0
    assert "18/18 examples reproduce" in capsys.readouterr().out
