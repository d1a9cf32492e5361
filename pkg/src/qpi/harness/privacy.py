"""Privacy and cost accounting: exhaustive mutual information, projection ranks, bound checks."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from ..algebra.linalg import rank as exact_rank
from ..hadamard import BudgetExceeded
from .runner import Setup
from .transcript import Transcript

DEFAULT_BUDGET = 1 << 24
SLACK = 1e-9


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def joint_cost_bound(n: int, t: int, m: int) -> float:
    """(n - t) log t + n H(t/n) + m (n - t)."""
    return (n - t) * math.log2(t) + n * binary_entropy(t / n) + m * (n - t)


def _entropy(counts, total: int) -> float:
    # H = log2 N - (1/N) sum c log2 c, from exact integer counts
    return math.log2(total) - sum(c * math.log2(c) for c in counts if c) / total


def enumeration_size(setup: Setup) -> int:
    a = setup.adapter
    return len(a.symbols()) ** setup.n * len(a.randomness())


def _enumerate(setup: Setup, budget: int):
    size = enumeration_size(setup)
    if size > budget:
        raise BudgetExceeded(f"enumeration of {size} (w, randomness) pairs exceeds budget {budget}")
    a = setup.adapter
    for symbols in product(a.symbols(), repeat=setup.n):
        w = a.weights(symbols)
        yield symbols, w, [a.query(w, randomness=r) for r in a.randomness()]


def mutual_information(setup: Setup, budget: int = DEFAULT_BUDGET) -> float:
    """I(W; Q) in bits with W uniform over the alphabet^n and uniform server randomness."""
    return _scan(setup, budget, ranks=False)[0]


def _projection_rank(V: np.ndarray) -> int:
    if np.iscomplexobj(V) or not np.allclose(V, np.round(V)):
        return int(np.linalg.matrix_rank(V)) if V.size else 0
    return exact_rank(np.round(V).astype(np.int64)) if V.size else 0


def _scan(setup: Setup, budget: int, ranks: bool) -> tuple[float, int]:
    joint: Counter = Counter()
    per_w = []
    worst = 0
    seen: dict[bytes, int] = {}
    a = setup.adapter
    for _, _, runs in _enumerate(setup, budget):
        local = Counter()
        for bits, message, _ in runs:
            key = np.packbits(bits).tobytes() + len(bits).to_bytes(4, "little")
            local[key] += 1
            joint[key] += 1
            if ranks and key not in seen:
                seen[key] = _projection_rank(a.projections(message))
                worst = max(worst, seen[key])
        per_w.append(local)
    n_w = len(per_w)
    n_r = len(a.randomness())
    h_q = _entropy(joint.values(), n_w * n_r)
    h_q_given_w = sum(_entropy(c.values(), n_r) for c in per_w) / n_w
    return max(0.0, h_q - h_q_given_w), worst


def user_privacy(transcript: Transcript) -> tuple[int, int]:
    """(real projections sent, rank of the projection vectors)."""
    V = np.asarray(transcript.projections)
    count = V.shape[0] * (2 if np.iscomplexobj(transcript.answers) else 1)
    return count, _projection_rank(V)


def publication_cost(transcript: Transcript, setup: Setup) -> tuple[int, float]:
    return transcript.d_bits, setup.adapter.d_info


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    margin: float
    attained: bool = False


def _ge(name: str, lhs: float, rhs: float) -> Check:
    margin = lhs - rhs
    return Check(name, lhs, rhs, margin >= -SLACK, margin, abs(margin) <= SLACK)


def _eq(name: str, lhs: float, rhs: float) -> Check:
    margin = lhs - rhs
    return Check(name, lhs, rhs, abs(margin) <= SLACK, margin, abs(margin) <= SLACK)


@dataclass
class PrivacyReport:
    protocol: str
    n: int
    t: int
    m: int
    q: int
    p: int
    A: str | None
    d_bits: int
    d_info: float
    ell: int
    ell_worst: int
    mi_bits: float | None
    entropyH: float
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def tradeoff_check(report: PrivacyReport, alphabet_size: int) -> Check:
    """I + ell log|A| >= n log|A|, flagging equality."""
    log_a = math.log2(alphabet_size)
    return _ge("tradeoff", report.mi_bits + report.ell * log_a, report.n * log_a)


def privacy_report(setup: Setup, budget: int = DEFAULT_BUDGET, with_mi: bool = True) -> PrivacyReport:
    """Measured cost, projection rank and (optionally) exhaustive MI, with every bound check."""
    a = setup.adapter
    if with_mi:
        mi, ell = _scan(setup, budget, ranks=True)
    else:
        mi, ell = None, a.ell_worst
    report = PrivacyReport(
        setup.protocol,
        setup.n,
        setup.t,
        setup.m,
        setup.q,
        setup.p,
        None if setup.A is None else str(setup.A),
        a.declared_bits,
        a.d_info,
        ell,
        a.ell_worst,
        mi,
        binary_entropy(setup.t / setup.n),
    )
    checks = [_ge("ell_le_worst", report.ell_worst, report.ell)]
    if setup.protocol in ("joint", "perfect"):
        checks.append(_ge("joint_cost_bound", joint_cost_bound(setup.n, setup.t, setup.m) + 1, report.d_bits))
    if mi is not None:
        checks.append(_eq("mi_formula", mi, a.mi_formula))
        checks.append(_ge("cost_ge_mi", report.d_bits, mi))
        checks.append(tradeoff_check(report, setup.alphabet_size))
    report.checks = checks
    return report


# -- serialization ----------------------------------------------------------

FIELDS = ("protocol", "n", "t", "m", "q", "p", "A", "d_bits", "d_info", "ell", "ell_worst", "mi_bits", "entropyH")


def _num(v):
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, Fraction):
        return float(f"{float(v):.12g}")
    return v


def _record(report: PrivacyReport) -> dict:
    out = {k: _num(getattr(report, k)) for k in FIELDS}
    out["passed"] = report.passed
    out["checks"] = [
        {
            "name": c.name,
            "lhs": _num(float(c.lhs)),
            "rhs": _num(float(c.rhs)),
            "satisfied": c.satisfied,
            "margin": _num(float(c.margin)),
            "attained": c.attained,
        }
        for c in report.checks
    ]
    return out


def emit_report(reports: list[PrivacyReport], fmt: str = "json") -> str:
    """Deterministic JSON or CSV; floats rounded to 12 significant digits."""
    records = [_record(r) for r in reports]
    if fmt == "json":
        return json.dumps({"reports": records}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([*FIELDS, "passed", "checks"])
        for rec in records:
            checks = ";".join(
                f"{c['name']}:{'pass' if c['satisfied'] else 'FAIL'}:{c['lhs']:.12g}:{c['rhs']:.12g}:{c['margin']:.12g}"
                f"{':attained' if c['attained'] else ''}"
                for c in rec["checks"]
            )
            row = ["" if rec[k] is None else (f"{rec[k]:.12g}" if isinstance(rec[k], float) else rec[k]) for k in FIELDS]
            writer.writerow([*row, rec["passed"], checks])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; expected json or csv")
