"""Sweep the ratio ||sum f_m||_p / ||{f_m}||_{L^p(l2)} across families and p.

    python3 scripts/sweep_constants.py --trials 200 --out runs/sweep
"""
import argparse
import json
from pathlib import Path

from walshlp.harness import FAMILIES, InstanceSpec, emit_report, estimate_constants

P_GRID = [1.1, 1.25, 1.5, 2.0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("-K", "--resolution", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-intervals", type=int, default=32)
    ap.add_argument("--out", type=Path, default=None, help="directory for per-family records")
    args = ap.parse_args()

    rows = {}
    for family in FAMILIES[:-1]:
        spec = InstanceSpec(resolution=args.resolution, family=family, seed=args.seed,
                            min_intervals=1 if family != "random-disjoint" else 2,
                            max_intervals=args.max_intervals)
        trials = 1 if family == "full-range" else args.trials
        summary, records = estimate_constants(spec, P_GRID, trials)
        rows[family] = {p: s["max"] for p, s in summary["per_p"].items()}
        print(family.ljust(16) + "  ".join(f"p={p:g}: {m:.4f}" for p, m in rows[family].items()))
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            emit_report(records, "csv", args.out / f"{family}.csv")
    if args.out:
        (args.out / "max_ratio.json").write_text(json.dumps(rows, indent=1) + "\n")


if __name__ == "__main__":
    main()
