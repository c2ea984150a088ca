#!/usr/bin/env python3
"""Interpolation-coefficient study for the linear fractional function x2/x1.

Emits b(lambda) along a pair, checks it against the closed form
y1 / (x1 + lambda (y1 - x1)), and extrapolates the limit q = lim b(lambda)
as lambda -> 0, which for this function equals y1/x1.

Usage:
    python scripts/bcurve_fractional.py [--x 1,0] [--y 2,2] [--grid 9] [--out curve.csv]
"""

import argparse
import sys

import numpy as np

from gencvx import compute_b, corpus_entry, estimate_q_limit


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=str, default="1,0")
    ap.add_argument("--y", type=str, default="2,2")
    ap.add_argument("--grid", type=int, default=9)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    fn = corpus_entry("fractional").handle
    x = np.array([float(t) for t in args.x.split(",")])
    y = np.array([float(t) for t in args.y.split(",")])
    if x[0] <= 0 or y[0] <= 0:
        print("both points need a positive first coordinate", file=sys.stderr)
        return 1

    lines = ["lambda,b,b_closed_form,lambda_b,strict,weak"]
    worst = 0.0
    for k in range(1, args.grid + 1):
        lam = k / (args.grid + 1)
        rec = compute_b(fn, x, y, lam)
        closed = y[0] / (x[0] + lam * (y[0] - x[0]))
        worst = max(worst, abs(rec.b - closed))
        lines.append(
            f"{lam:.17g},{rec.b:.17g},{closed:.17g},{rec.lam_b:.17g},"
            f"{str(rec.strict).lower()},{str(rec.weak).lower()}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)

    q = estimate_q_limit(fn, x, y)
    print(f"# max |b - closed form| over the grid: {worst:.3e}", file=sys.stderr)
    print(
        f"# q-limit: extrapolated {q.limit:.12g}, closed form {q.closed_form:.12g}, "
        f"y1/x1 = {y[0] / x[0]:.12g}, converged: {q.converged}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
