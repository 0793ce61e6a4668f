"""Command-line interface.

Subcommands: plan, build, encode, repair, verify, bench.  Exit codes are
a stable contract: 0 success, 1 malformed flags or unreadable input,
2 structural infeasibility (planner windows, repair certificates, build
cap, failed verification).  Reported numbers are exact rationals shown
as num/den plus a decimal.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .construction import (
    DEFAULT_BUILD_CAP,
    ConstructionPlan,
    build_code,
    plan_constant_overhead,
    plan_epsilon_msr,
    plan_manual,
)
from .errors import InfeasibilityError, NotDualCodeword, RepairSimError
from .repair import RepairScheme, build_dual_family, gw_verify
from .simharness import Cluster, Scenario, ingest, run_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


_BIG = 10 ** 12


def _fmt(x: Fraction) -> str:
    # Decimal handles ratios whose terms overflow float (huge sub-packetization);
    # exact terms are shown only while they stay readable (the plan file always
    # carries them in full)
    approx = Decimal(x.numerator) / Decimal(x.denominator)
    if x.numerator > _BIG or x.denominator > _BIG:
        return f"~{approx:.6g}"
    return f"{x.numerator}/{x.denominator} ({approx:.6g})"


def _fmt_int(x: int) -> str:
    return str(x) if x < _BIG else f"{Decimal(x):.6e}"


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rsrepair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[], help="plan an evaluation set and report feasibility")
    p.add_argument("--scheme", choices=("manual", "thm1", "thm2"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--delta", type=Fraction, default=Fraction(1, 10))
    p.add_argument("--epsilon", type=Fraction, default=None)
    p.add_argument("--primes", type=_int_list, default=None, help="manual scheme: 3,5,7")
    p.add_argument("--sizes", type=_int_list, default=None, help="manual scheme: per-prime subset sizes")
    p.add_argument("--out", type=Path, default=Path("plan.json"), help="plan file to write")

    p = sub.add_parser("build", help="build the tower and code for a plan (cap-gated)")
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_BUILD_CAP)
    p.add_argument("--out", type=Path, default=None, help="optional code description JSON")

    p = sub.add_parser("encode", help="encode a payload across the cluster and dump it")
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--input", type=Path, default=None, help="payload file")
    p.add_argument("--seed", type=int, default=0, help="payload RNG seed (no --input)")
    p.add_argument("--length", type=int, default=1024, help="payload bytes (no --input)")
    p.add_argument("--out", type=Path, required=True, help="cluster dump JSON")
    p.add_argument("--cap", type=int, default=DEFAULT_BUILD_CAP)

    p = sub.add_parser("repair", help="run a failure scenario and write reports")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("."), help="report directory")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("verify", help="dual-family verification of one node's repair")
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_BUILD_CAP)

    p = sub.add_parser("bench", help="repair timing and bandwidth stats")
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_BUILD_CAP)
    p.add_argument("--out", type=Path, default=None, help="optional stats CSV directory")

    return parser


def _print_feasibility(plan: ConstructionPlan) -> None:
    print(
        f"plan: scheme={plan.scheme} n={plan.n} k={plan.k} q={plan.q} "
        f"m={plan.m} l={_fmt_int(plan.l)}"
    )
    print(f"cut-set bound per stripe: {_fmt(plan.cutset())} sub-symbols")
    header = (
        f"{'prime':>6} {'used':>5} {'need':>5} {'avail':>6} {'repairable':>10} "
        f"{'per-helper':>12} {'total':>12} {'ratio_total':>22} {'ratio_helper':>22}"
    )
    print(header)
    for f in plan.feasibility:
        print(
            f"{f.prime:>6} {f.assigned:>5} {f.required_helpers:>5} "
            f"{f.available_helpers:>6} {str(f.repairable).lower():>10} "
            f"{_fmt_int(f.per_helper_subsymbols):>12} {_fmt_int(f.total_subsymbols):>12} "
            f"{_fmt(f.ratio_total):>22} {_fmt(f.ratio_per_helper):>22}"
        )


def _cmd_plan(args) -> int:
    if args.scheme == "manual":
        if args.primes is None or args.sizes is None:
            raise SystemExit(_usage_error("manual scheme needs --primes and --sizes"))
        plan = plan_manual(args.q, args.primes, args.sizes, args.n, args.k)
    elif args.scheme == "thm1":
        plan = plan_constant_overhead(args.n, args.k, args.delta, args.q)
    else:
        if args.epsilon is None:
            raise SystemExit(_usage_error("thm2 needs --epsilon"))
        plan = plan_epsilon_msr(args.n, args.k, args.epsilon, args.delta, args.q)
    _print_feasibility(plan)
    plan.save(args.out)
    print(f"plan written to {args.out}")
    return EXIT_OK


def _usage_error(message: str) -> int:
    print(f"rsrepair: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load_plan(path: Path) -> ConstructionPlan:
    return ConstructionPlan.load(path)


def _cmd_build(args) -> int:
    plan = _load_plan(args.plan)
    tower, code = build_code(plan, max_subpacketization=args.cap)
    classes = {p: plan.subset_sizes[i] for i, p in enumerate(plan.primes)}
    print(f"built code: n={code.n} k={code.k} l={tower.l} classes={classes}")
    print("evaluation points pairwise distinct: true")
    if args.out is not None:
        doc = {
            "schema_version": 1,
            "tower": tower.to_dict(),
            "plan": plan.to_dict(),
            "evals": [b.to_bytes().hex() for b in code.evals],
        }
        args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"code description written to {args.out}")
    return EXIT_OK


def _cmd_encode(args) -> int:
    plan = _load_plan(args.plan)
    tower, code = build_code(plan, max_subpacketization=args.cap)
    if args.input is not None:
        data = args.input.read_bytes()
    else:
        data = random.Random(args.seed).randbytes(args.length)
    cluster = Cluster(tower, code, plan)
    cluster.encode_and_distribute(ingest(data, code))
    doc = {
        "schema_version": 1,
        "plan": plan.to_dict(),
        "tower": tower.to_dict(),
        "payload_length": len(data),
        "stripe_count": cluster.stripe_count,
        "nodes": [
            {"alive": cluster.alive[j], "stripes": [s.to_bytes().hex() for s in node]}
            for j, node in enumerate(cluster.nodes)
        ],
    }
    args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(
        f"encoded {len(data)} bytes into {cluster.stripe_count} stripes "
        f"across {code.n} nodes -> {args.out}"
    )
    return EXIT_OK


def _cmd_repair(args) -> int:
    scenario = Scenario.load(args.scenario)
    report = run_scenario(scenario, outdir=args.out, figures=not args.no_figures)
    for row in report.rows:
        print(
            f"node {row.node} (prime {row.prime}, {row.scheme}): "
            f"{row.subsymbols} sub-symbols over {row.stripe_count} stripes, "
            f"ratio_total {_fmt(row.ratio_total)}, ratio_helper {_fmt(row.ratio_helper)}"
        )
    agg = report.aggregates()
    if agg is None:
        print("no failures; empty report")
    else:
        print(f"epsilon_measured = {_fmt(agg['epsilon_measured'])}")
    print(f"reports written to {args.out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    plan = _load_plan(args.plan)
    tower, code = build_code(plan, max_subpacketization=args.cap)
    scheme = RepairScheme(code, plan)
    rng = random.Random(0)
    transcript = scheme.repair(code.encode(code.random_message(rng)), args.node)
    family = build_dual_family(code, plan, args.node)
    result = gw_verify(code, family, args.node)
    metered = transcript.total_subsymbols
    print(f"node {args.node}: full_rank={result['full_rank']}")
    print(f"dual-family bandwidth: {result['bandwidth']} sub-symbols")
    print(f"metered transcript total: {metered} sub-symbols")
    if result["full_rank"] and result["bandwidth"] == metered:
        print("verification: OK")
        return EXIT_OK
    print("verification: MISMATCH", file=sys.stderr)
    return EXIT_INFEASIBLE


def _cmd_bench(args) -> int:
    plan = _load_plan(args.plan)
    tower, code = build_code(plan, max_subpacketization=args.cap)
    scheme = RepairScheme(code, plan)
    rng = random.Random(args.seed)
    lines = []
    print(
        f"{'node':>5} {'prime':>6} {'scheme':>7} {'subsymbols':>11} "
        f"{'ratio_total':>22} {'mean_ms':>9}"
    )
    for j in range(code.n):
        cls = plan.class_of(j)
        if plan.is_repairable_class(cls):
            elapsed = 0.0
            total = None
            for _ in range(args.trials):
                word = code.encode(code.random_message(rng))
                t0 = time.perf_counter()
                transcript = scheme.repair(word, j)
                elapsed += time.perf_counter() - t0
                assert transcript.reconstructed == word[j]
                total = transcript.total_subsymbols
            if args.trials == 0:
                continue
            mean_ms = 1000.0 * elapsed / args.trials
            ratio = Fraction(total) / transcript.cutset
            print(
                f"{j:>5} {plan.primes[cls]:>6} {'trace':>7} {total:>11} "
                f"{_fmt(ratio):>22} {mean_ms:>9.2f}"
            )
            lines.append((j, plan.primes[cls], "trace", total, ratio, mean_ms))
        else:
            print(f"{j:>5} {plan.primes[cls]:>6} {'naive':>7} {'-':>11} {'-':>22} {'-':>9}")
    if args.out is not None and lines:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "bench.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("node,prime,scheme,subsymbols,ratio_num,ratio_den,mean_ms\n")
            for j, p, sch, total, ratio, mean_ms in lines:
                fh.write(
                    f"{j},{p},{sch},{total},{ratio.numerator},{ratio.denominator},"
                    f"{mean_ms:.3f}\n"
                )
        print(f"bench stats written to {path}")
    return EXIT_OK


_COMMANDS = {
    "plan": _cmd_plan,
    "build": _cmd_build,
    "encode": _cmd_encode,
    "repair": _cmd_repair,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except InfeasibilityError as exc:
        print(f"rsrepair: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotDualCodeword as exc:
        print(f"rsrepair: verification failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (RepairSimError, ValueError, KeyError) as exc:
        print(f"rsrepair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rsrepair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
