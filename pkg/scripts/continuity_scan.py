"""Speed versus a across the monostable/bistable boundary at fixed (b, r, d).

    python3 scripts/continuity_scan.py --b 2 --from 0.6 --to 1.4 --steps 17 --out scan_b2.csv
"""
import argparse
import csv

import numpy as np

from frontlab.speed import continuity_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, default=2.0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--d", type=float, default=1.0)
    ap.add_argument("--from", dest="a_from", type=float, default=0.6)
    ap.add_argument("--to", dest="a_to", type=float, default=1.4)
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="continuity_scan.csv")
    args = ap.parse_args()

    a_list = [round(a, 12) for a in np.linspace(args.a_from, args.a_to, args.steps)]
    res = continuity_scan(args.b, args.r, args.d, a_list, workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a", "value", "stderr", "method"])
        for a, est in res.points:
            w.writerow([a, est.value, est.stderr, est.method.value])
    print(f"max adjacent jump {res.max_jump:.4f}; monotone={res.monotone}; at a=1: {res.at_one}")
    for a, est in res.points:
        print(f"  a={a:<6g} c={est.value:.5f} +- {est.stderr:.1e} ({est.method.value})")


if __name__ == "__main__":
    main()
