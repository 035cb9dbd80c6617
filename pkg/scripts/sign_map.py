"""Numeric wave-speed sign over an (a, b) grid, compared with the closed-form clauses where they apply.

    python3 scripts/sign_map.py --r 1 --d 2 --n 6 --out sign_map.csv
"""
import argparse
import csv
import itertools

import numpy as np

from frontlab.model import ModelParams, SignValue, guo_lin_sign
from frontlab.speed import estimate_wave_speed_signed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--d", type=float, default=1.0)
    ap.add_argument("--lo", type=float, default=1.2)
    ap.add_argument("--hi", type=float, default=5.0)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--out", default="sign_map.csv")
    args = ap.parse_args()

    axis = np.linspace(args.lo, args.hi, args.n)
    disagree = 0
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a", "b", "c", "stderr", "closed_form"])
        for a, b in itertools.product(axis, axis):
            p = ModelParams(float(a), float(b), args.r, args.d)
            est = estimate_wave_speed_signed(p)
            cf = guo_lin_sign(p).value
            w.writerow([a, b, est.value, est.stderr, cf.value])
            if cf in (SignValue.POSITIVE, SignValue.NEGATIVE) and (est.value > 0) != (cf is SignValue.POSITIVE):
                disagree += 1
                print(f"disagreement at a={a:.3f}, b={b:.3f}: c={est.value:+.4f}, closed form {cf.value}")
    print(f"{args.n ** 2} points written to {args.out}; {disagree} disagreements with the closed form")


if __name__ == "__main__":
    main()
