"""Command-line entry point: ``walshlp verify ...``, ``estimate``, ``weak-type``, ``report``.

Exit status: 0 when every check passes, 1 on a violated invariant (one-line
summary on stderr), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import verify
from .harness import (
    FAMILIES,
    LAWS,
    InstanceSpec,
    InvariantViolation,
    emit_report,
    estimate_constants,
    weak_type_probe,
)
from .walsh import MAX_RESOLUTION


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _resolution(text: str) -> int:
    n = _positive_int(text)
    if n > MAX_RESOLUTION:
        raise argparse.ArgumentTypeError(f"resolution must be in [1, {MAX_RESOLUTION}]")
    return n


def _p_value(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None
    if not 1 < p <= 2:
        raise argparse.ArgumentTypeError(f"p must lie in (1, 2], got {p}")
    return p


def _p_grid(text: str) -> list[float]:
    return [_p_value(t) for t in text.split(",") if t.strip()]


def _add_instance_args(sp: argparse.ArgumentParser, trials_default: int = 200) -> None:
    sp.add_argument("--resolution", "-K", type=_resolution, default=12,
                    help="grid resolution K; functions live on 2^K cells (default: 12)")
    sp.add_argument("--trials", type=_positive_int, default=trials_default,
                    help=f"number of random instances (default: {trials_default})")
    sp.add_argument("--seed", type=int, default=0,
                    help="base seed; trial t uses seed+t (default: 0)")
    sp.add_argument("--max-intervals", type=_positive_int, default=16,
                    help="largest interval count M per instance (default: 16)")
    sp.add_argument("--min-intervals", type=_positive_int, default=1,
                    help="smallest interval count M per instance (default: 1)")
    sp.add_argument("--family", choices=FAMILIES[:-1], default="random-disjoint",
                    help="interval family (default: random-disjoint)")
    sp.add_argument("--law", choices=LAWS, default="gaussian",
                    help="law of the Walsh coefficients on each interval (default: gaussian)")


def _add_output_args(sp: argparse.ArgumentParser, required: bool = False) -> None:
    sp.add_argument("--out", required=required, default=None,
                    help="write trial records to this path" + ("" if required else " (default: none)"))
    sp.add_argument("--format", choices=("json", "csv"), default="json",
                    help="record file format (default: json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walshlp",
        description="Verify and measure the one-sided Littlewood-Paley inequality for the Walsh system.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run exhaustive / randomized verification suites")
    vs = v.add_subparsers(dest="suite", required=True)
    g = vs.add_parser("group", help="XOR group laws for all a, b, c < max-n")
    g.add_argument("--max-n", type=_positive_int, default=256, help="exclusive bound (default: 256)")
    li = vs.add_parser("lemma-intervals", help="XOR images of interval rows against brute force")
    li.add_argument("--max-n", type=_positive_int, default=2048, help="check 1 <= n < max-n (default: 2048)")
    li.add_argument("--tail-rows", type=int, default=3, help="rows right of n per n (default: 3)")
    pa = vs.add_parser("partition", help="interval partitions for all 0 <= a < b <= max-b")
    pa.add_argument("--max-b", type=_positive_int, default=1024, help="largest right end b (default: 1024)")
    tr = vs.add_parser("transform", help="Parseval, round trip, orthonormality, character identity")
    tr.add_argument("--resolution", "-K", type=_resolution, default=12, help="grid resolution (default: 12)")
    tr.add_argument("--trials", type=_positive_int, default=100, help="random functions (default: 100)")
    tr.add_argument("--seed", type=int, default=0, help="seed (default: 0)")
    ma = vs.add_parser("martingale", help="E_k / Delta_k / square-function identities")
    ma.add_argument("--resolution", "-K", type=_resolution, default=12, help="grid resolution (default: 12)")
    ma.add_argument("--trials", type=_positive_int, default=20, help="random functions (default: 20)")
    ma.add_argument("--seed", type=int, default=0, help="seed (default: 0)")
    ch = vs.add_parser("chain", help="decomposition identities on random instances")
    ch.add_argument("--resolution", "-K", type=_resolution, default=12, help="grid resolution (default: 12)")
    ch.add_argument("--trials", type=_positive_int, default=200, help="random instances (default: 200)")
    ch.add_argument("--max-intervals", type=_positive_int, default=16, help="intervals per instance (default: 16)")
    ch.add_argument("--seed", type=int, default=0, help="base seed (default: 0)")
    vs.add_parser("all", help="every suite above with its defaults")

    est = sub.add_parser("estimate", help="ratio ||sum f_m||_p / ||{f_m}||_{L^p(l2)} over a p-grid")
    est.add_argument("--p-grid", type=_p_grid, default=[1.1, 1.25, 1.5, 2.0],
                     help="comma-separated exponents in (1, 2] (default: 1.1,1.25,1.5,2.0)")
    _add_instance_args(est)
    _add_output_args(est)
    est.add_argument("--summary", default=None, help="write the summary table as JSON to this path")

    rep = sub.add_parser("report", help="like estimate, but the record file is mandatory")
    rep.add_argument("--p-grid", type=_p_grid, default=[1.1, 1.25, 1.5, 2.0],
                     help="comma-separated exponents in (1, 2] (default: 1.1,1.25,1.5,2.0)")
    _add_instance_args(rep)
    _add_output_args(rep, required=True)

    wt = sub.add_parser("weak-type", help="weak (1,1) probes sup lam |{|Tf| > lam}| / ||f||_1")
    wt.add_argument("--operator", choices=("S", "G"), default="S", help="operator T (default: S)")
    wt.add_argument("--exact", action="store_true",
                    help="exact supremum over lam instead of the geometric grid")
    _add_instance_args(wt)
    return parser


def _spec(args) -> InstanceSpec:
    if args.min_intervals > args.max_intervals:
        raise ValueError("--min-intervals exceeds --max-intervals")
    return InstanceSpec(resolution=args.resolution, family=args.family, law=args.law,
                        max_intervals=args.max_intervals, min_intervals=args.min_intervals,
                        seed=args.seed)


def _print_summary(summary: dict) -> None:
    for p, row in summary["per_p"].items():
        print(f"p={p:g}: max={row['max']:.6f} median={row['median']:.6f} "
              f"mean={row['mean']:.6f} n={row['count']}")
        for M, s in row["by_M"].items():
            print(f"    M={M:3d}: max={s['max']:.6f} median={s['median']:.6f} n={s['count']}")
        print(f"    max ratio non-increasing in M: {row['max_nonincreasing_in_M']}")
    print(f"max ratio over sweep: {summary['max_ratio']:.6f}")


def _run_verify(args) -> None:
    suites = {
        "group": lambda: verify.verify_group(args.max_n),
        "lemma-intervals": lambda: verify.verify_lemma_intervals(args.max_n, args.tail_rows),
        "partition": lambda: verify.verify_partition(args.max_b),
        "transform": lambda: verify.verify_transform(args.resolution, args.trials, args.seed),
        "martingale": lambda: verify.verify_martingale(args.resolution, args.trials, args.seed),
        "chain": lambda: verify.verify_chain(args.resolution, args.trials, args.max_intervals, args.seed),
    }
    if args.suite == "all":
        todo = {
            "group": verify.verify_group,
            "lemma-intervals": verify.verify_lemma_intervals,
            "partition": verify.verify_partition,
            "transform": verify.verify_transform,
            "martingale": verify.verify_martingale,
            "chain": verify.verify_chain,
        }
    else:
        todo = {args.suite: suites[args.suite]}
    for name, fn in todo.items():
        t0 = time.perf_counter()
        info = fn()
        print(f"ok   verify {name} {json.dumps(info, sort_keys=True)} ({time.perf_counter() - t0:.1f}s)")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            _run_verify(args)
        elif args.command in ("estimate", "report"):
            spec = _spec(args)
            print(f"seed={spec.seed} K={spec.resolution} trials={args.trials} family={spec.family} "
                  f"law={spec.law} p-grid={','.join(f'{p:g}' for p in args.p_grid)}")
            summary, records = estimate_constants(spec, args.p_grid, args.trials)
            _print_summary(summary)
            if args.out:
                emit_report(records, args.format, args.out)
                print(f"wrote {len(records)} records to {args.out}")
            if getattr(args, "summary", None):
                with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
                    json.dump(summary, fh, indent=1, default=str)
                    fh.write("\n")
        elif args.command == "weak-type":
            spec = _spec(args)
            grid = "exact" if args.exact else None
            res = weak_type_probe(args.operator, spec, args.trials, grid)
            print(f"seed={spec.seed} K={spec.resolution} trials={args.trials} operator={args.operator} "
                  f"lambda={'exact' if args.exact else 'geometric grid'}")
            print(f"max={res['max']:.6f} median={res['median']:.6f} mean={res['mean']:.6f}")
    except InvariantViolation as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"walshlp: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"walshlp: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
