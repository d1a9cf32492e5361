"""Command line: run protocols, scan privacy frontiers, replay the worked examples.

Exit codes: 0 ok, 1 a check failed, 2 bad arguments, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..hadamard import (
    BudgetExceeded,
    FiniteSet,
    HadamardError,
    classify_set,
    coefficient_complexity,
    coefficient_vector,
)
from ..proto_pm1 import ProtocolError
from .examples import verify_examples
from .privacy import DEFAULT_BUDGET, emit_report, privacy_report
from .runner import Setup, StepError, run_trials
from .transcript import PROTOCOL_IDS

EXIT_OK, EXIT_CHECK, EXIT_ARGS, EXIT_BUDGET = 0, 1, 2, 3

RUNNERS = {
    "pm1-coset": "coset",
    "pm1-randkey": "improved_random_key",
    "joint": "joint",
    "perfect": "perfect",
    "hard": "hard",
    "rou": "rou",
    "zpm1": "zpm1",
}
DEFAULT_SETS = {"perfect": "-3,-1,1,3", "hard": "-2,0,1,2"}


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=4)
    common.add_argument("--t", type=int, default=2)
    common.add_argument("--m", type=int, default=2)
    common.add_argument("--q", type=int, default=1)
    common.add_argument("--p", type=int, default=4)
    common.add_argument("--set", dest="set_", metavar="CSV", help="comma-separated rationals, e.g. -3,-1,1,3")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--transcript", metavar="PATH", help="write the first transcript in binary form")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget for I(W;Q)")
    common.add_argument("--skip-mi", action="store_true", help="do not enumerate I(W;Q)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    for name in RUNNERS:
        p = sub.add_parser(name, parents=[common], help=f"run the {RUNNERS[name]} protocol")
        if name == "pm1-randkey":
            p.add_argument("--basic", action="store_true", help="uniform random keys, n published bits")
    sub.add_parser("complexity", parents=[common], help="coefficient complexity and class of --set")
    scan = sub.add_parser("privacy-scan", parents=[common], help="sweep t and print the (I, ell, d) frontier")
    scan.add_argument("--protocol", choices=list(PROTOCOL_IDS), default="coset")
    sub.add_parser("verify-paper-examples", parents=[common], help="replay the worked examples")
    return parser


def _set(args, protocol: str) -> FiniteSet | None:
    text = args.set_ or DEFAULT_SETS.get(protocol)
    return None if text is None else FiniteSet.parse(text)


def _setup(args, protocol: str, t: int | None = None) -> Setup:
    return Setup(
        protocol,
        args.n,
        args.t if t is None else t,
        m=args.m,
        q=args.q,
        p=3 if protocol == "zpm1" else args.p,
        A=_set(args, protocol) if protocol in ("perfect", "hard") else None,
    )


def _run(args, protocol: str) -> int:
    setup = _setup(args, protocol)
    transcripts = run_trials(setup, args.trials, args.seed)
    if args.transcript and transcripts:
        with open(args.transcript, "wb") as fh:
            fh.write(transcripts[0].to_bytes())
    report = privacy_report(setup, args.budget, with_mi=not args.skip_mi)
    sys.stdout.write(emit_report([report], args.format))
    return EXIT_OK if report.passed else EXIT_CHECK


def _complexity(args) -> int:
    if not args.set_:
        raise ProtocolError("complexity needs --set")
    A = FiniteSet.parse(args.set_)
    cls = classify_set(A, budget=args.budget) if _is_pow2(len(A)) else None
    if cls is None:
        cert = coefficient_complexity(A, budget=args.budget)
        kind, gamma = "n/a", None
    else:
        cert, kind = cls.certificate, cls.kind
        gamma = coefficient_vector(A)[1]
    record = {
        "set": str(A),
        "theta": cert.theta,
        "kind": kind,
        "gamma": gamma,
        "lambdas": [str(v) for v in cert.lambdas],
        "certificate_ok": cert.verify(A),
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(record, indent=2) + "\n")
    else:
        sys.stdout.write("set,theta,kind,gamma,lambdas,certificate_ok\n")
        sys.stdout.write(f"\"{record['set']}\",{cert.theta},{kind},{'' if gamma is None else gamma},"
                         f"\"{' '.join(record['lambdas'])}\",{record['certificate_ok']}\n")
    return EXIT_OK if record["certificate_ok"] else EXIT_CHECK


def _is_pow2(k: int) -> bool:
    return k >= 2 and k & (k - 1) == 0


def _scan(args) -> int:
    reports = []
    for t in range(1, args.n + 1):
        if args.protocol in ("joint", "perfect") and args.q > t:
            continue
        reports.append(privacy_report(_setup(args, args.protocol, t), args.budget, with_mi=not args.skip_mi))
    sys.stdout.write(emit_report(reports, args.format))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def _verify(args) -> int:
    results = verify_examples(seed=args.seed)
    failed = 0
    for res in results:
        print(f"{res.status.upper():8s} {res.name}: {res.detail}")
        failed += res.status == "fail"
    print(f"{len(results) - failed}/{len(results)} examples reproduce ({sum(r.status == 'erratum' for r in results)} documented errata)")
    return EXIT_CHECK if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGS if exc.code else EXIT_OK
    try:
        if args.command in RUNNERS:
            protocol = RUNNERS[args.command]
            if args.command == "pm1-randkey" and args.basic:
                protocol = "random_key"
            return _run(args, protocol)
        if args.command == "complexity":
            return _complexity(args)
        if args.command == "privacy-scan":
            return _scan(args)
        return _verify(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except StepError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ProtocolError, HadamardError, ValueError) as exc:
        print(f"bad arguments: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
