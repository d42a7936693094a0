"""Weak (1,1) envelopes of S and G over random instances, for a few resolutions."""
import argparse

from walshlp.harness import InstanceSpec, weak_type_probe


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--resolutions", default="8,10,12")
    args = ap.parse_args()

    print(f"{'K':>3} {'op':>3} {'max':>9} {'median':>9}")
    for K in map(int, args.resolutions.split(",")):
        spec = InstanceSpec(resolution=K, max_intervals=16, seed=args.seed)
        for op in ("S", "G"):
            res = weak_type_probe(op, spec, args.trials, "exact")
            print(f"{K:>3} {op:>3} {res['max']:9.4f} {res['median']:9.4f}")


if __name__ == "__main__":
    main()
