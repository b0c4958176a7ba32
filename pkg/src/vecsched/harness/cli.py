"""``vecsched`` command line: gen | run | game | encode | bench.

Exit status is 0 when every evaluated invariant check passes, 1 when one
fails and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from ..adversaries.clique_game import (RetriesExhausted, builtin_strategy, clique_game_play,
                                       sample_good_sequence, slot_cliques_ok)
from ..adversaries.encoding import DEFAULT_DIMS_CAP, CapExceeded
from ..core import VecSchedError
from ..schedulers import ALGORITHMS
from . import io as iofmt
from .bench import BENCH_HELP, SUITES, bench
from .gen import KINDS, BadParams, generate
from .report import REPORT_COLUMNS, dump_json
from .run import run_encode, run_file

RUN_HELP = f"""\
run CSV columns (RFC 4180, CRLF line ends): {", ".join(REPORT_COLUMNS)}
  one row per dimension and norm; norm "inf" is the makespan; ratio = value / lower_bound
  (1 when both are 0).  lower_bound is the Lr lower bound for identical instances, the
  target T_k for unrelated ones, the reverse assignment for pairing-lb and the adversary
  coloring for clique-encode.  checks is "name:pass;name:fail;..." (empty without --check).
INSTANCE is a JSON file from `vecsched gen` or a driver spec such as pairing-lb:h=3 or
clique-encode:m=4.
"""


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(",")):
        key, _, value = part.partition("=")
        out[key.strip()] = value.strip()
    return out


def _write(path: str | None, suffix: str, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(str(path) + suffix).write_text(text)


def _finish(checks: dict) -> int:
    bad = [k for k, v in checks.items() if not v]
    for name in bad:
        print(f"invariant failed: {name}", file=sys.stderr)
    return 1 if bad else 0


def cmd_gen(args) -> int:
    params = {k: v for k, v in (("m", args.m), ("d", args.d), ("n", args.n), ("h", args.h),
                                ("forbid", args.forbid), ("dist", args.dist), ("norms", args.norms))
              if v is not None}
    f = generate(args.kind, params, args.seed)
    text = iofmt.dumps(f) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_instance(spec: str, seed: int) -> iofmt.InstanceFile:
    path = Path(spec)
    if path.exists():
        return iofmt.load(path)
    kind, _, params = spec.partition(":")
    if kind in ("pairing-lb", "clique-encode"):
        return generate(kind, _kv(params), seed)
    raise BadParams(f"{spec!r} is neither a file nor an adaptive driver spec")


def cmd_run(args) -> int:
    f = _load_instance(args.instance, args.seed)
    report = run_file(args.algorithm, f, args.seed, args.check, args.dims_cap)
    if args.out:
        _write(args.out, ".csv", report.csv_text())
        _write(args.out, ".transcript.json", dump_json(report.transcript) + "\n")
    else:
        sys.stdout.write(report.csv_text())
    return _finish(report.checks)


def cmd_game(args) -> int:
    s = math.isqrt(args.t)
    strings, cert = sample_good_sequence(args.t, args.seed, max_retries=args.retries)
    tr = clique_game_play(args.t, builtin_strategy(args.strategy, args.seed), strings.tolist())
    alg, adv = tr.algorithm_clique(), tr.adversary_clique()
    checks = {}
    if args.check:
        checks = {
            "algorithm_clique": alg >= s,
            "halted_within_t2": tr.full_slot is not None and tr.n <= args.t ** 2,
            "slot_cliques": slot_cliques_ok(tr),
            "adversary_clique": adv <= 20,
        }
    tr.summary = {
        "t": args.t, "strategy": args.strategy, "seed": args.seed, "vertices": tr.n,
        "algorithm_clique": alg, "adversary_clique": adv, "adversary_clique_ok": adv <= 20,
        "witness_slot": tr.full_slot, "certificate": cert.to_dict(), "checks": checks,
    }
    if args.out:
        _write(args.out, ".transcript.json", dump_json(tr.to_dict()) + "\n")
    print(dump_json(tr.summary))
    return _finish(checks)


def cmd_encode(args) -> int:
    report, res = run_encode(args.scheduler, args.m, args.seed, args.check, args.dims_cap)
    summary = {**report.transcript["summary"], "scheduler": args.scheduler, "seed": args.seed,
               "ratios": report.transcript["ratios"], "checks": report.checks}
    if args.out:
        _write(args.out, ".csv", report.csv_text())
        _write(args.out, ".transcript.json", dump_json(report.transcript) + "\n")
    print(dump_json(summary))
    return _finish(report.checks)


def cmd_bench(args) -> int:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            ok, per_cell = bench(args.suite, args.seeds, fh, args.jobs)
    else:
        ok, per_cell = bench(args.suite, args.seeds, sys.stdout, args.jobs)
    for results in per_cell:
        for seed, res in zip(args.seeds, results):
            print(f"[seed {seed}] {res.line()}", file=sys.stderr)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vecsched", description="Online vector scheduling toolkit.",
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog=RUN_HELP + "\n" + BENCH_HELP)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded instance file")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--m", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--h", type=int, help="pairing-lb depth (m = d = 2^h)")
    g.add_argument("--forbid", type=float, help="probability a machine is forbidden for a job")
    g.add_argument("--dist", help="uniform | exponential | sparse | pareto")
    g.add_argument("--norms", help="comma-separated exponents, 'inf' for makespan, or 'mixed'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a scheduler on an instance",
                       formatter_class=argparse.RawDescriptionHelpFormatter, epilog=RUN_HELP)
    r.add_argument("algorithm", choices=ALGORITHMS)
    r.add_argument("instance")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--check", action="store_true", help="evaluate invariant checks")
    r.add_argument("--out", help="write OUT.csv and OUT.transcript.json instead of CSV on stdout")
    r.add_argument("--dims-cap", type=int, default=DEFAULT_DIMS_CAP)
    r.set_defaults(func=cmd_run)

    gm = sub.add_parser("game", help="play the clique game on a certified string sequence")
    gm.add_argument("--t", type=int, required=True)
    gm.add_argument("--strategy", default="greedy", help="greedy | random | round-robin | fixed:B")
    gm.add_argument("--seed", type=int, default=0)
    gm.add_argument("--retries", type=int, default=3)
    gm.add_argument("--check", action="store_true")
    gm.add_argument("--out", help="write the transcript to OUT.transcript.json")
    gm.set_defaults(func=cmd_game)

    e = sub.add_parser("encode", help="drive a scheduler with the clique encoding")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--scheduler", default="vsmax-i-derand", choices=ALGORITHMS)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--dims-cap", type=int, default=DEFAULT_DIMS_CAP)
    e.add_argument("--check", action="store_true")
    e.add_argument("--out", help="write OUT.csv and OUT.transcript.json")
    e.set_defaults(func=cmd_encode)

    b = sub.add_parser("bench", help="run a predefined suite over seeds",
                       formatter_class=argparse.RawDescriptionHelpFormatter, epilog=BENCH_HELP)
    b.add_argument("suite", choices=sorted(SUITES))
    b.add_argument("--seeds", type=int, nargs="*", default=[0])
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.add_argument("--out", help="CSV path (stdout if omitted)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BadParams, CapExceeded, RetriesExhausted, ValueError, VecSchedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
