#!/usr/bin/env python3
"""Classify every corpus member and compare against its ground-truth labels.

Equivalent to `gencvx corpus`, with a compact matrix printout and an
implication-lattice self-check at the end.

Usage:
    python scripts/run_corpus.py [--seed 42] [--samples 200] [--out corpus.json]
"""

import argparse
import json
import sys
import time

from gencvx import SamplingPlan, check_implication_lattice, classify, corpus
from gencvx.functions import PROPERTIES

SHORT = {
    "pseudoconvex": "pcvx",
    "pseudoconcave": "pccv",
    "pseudolinear": "plin",
    "quasiconvex": "qcvx",
    "quasiconcave": "qccv",
    "quasilinear": "qlin",
    "semistrictly-quasiconvex": "sscvx",
    "semistrictly-quasiconcave": "ssccv",
    "semistrictly-quasilinear": "sslin",
}
MARK = {"holds-at-samples": "+", "refuted": "-", "inconclusive": "?"}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--out", type=str, default=None)
    args = ap.parse_args()

    plan = SamplingPlan(pair_count=args.samples, seed=args.seed)
    header = " ".join(f"{SHORT[p]:>6}" for p in PROPERTIES)
    print(f"{'function':12s} {header}   (+ holds, - refuted, ? inconclusive; . = label)")

    verdict_sets = {}
    rows = {}
    mismatches = 0
    t0 = time.time()
    for entry in corpus():
        verdicts = classify(entry.handle, entry.region, PROPERTIES, plan)
        vmap = {v.property: v.verdict for v in verdicts}
        verdict_sets[entry.handle.name] = vmap
        cells = []
        for p in PROPERTIES:
            want = "holds-at-samples" if entry.labels[p] else "refuted"
            got = MARK[vmap[p]]
            ok = vmap[p] == want
            mismatches += 0 if ok else 1
            cells.append(f"{got if ok else got + '!':>6}")
        print(f"{entry.handle.name:12s} {' '.join(cells)}")
        rows[entry.handle.name] = vmap
    elapsed = time.time() - t0

    violations = check_implication_lattice(verdict_sets)
    print(f"\n{elapsed:.1f}s, mismatches: {mismatches}, "
          f"lattice violations: {len(violations)}")
    for v in violations:
        print(f"  {v.function}: {v.antecedent} holds but {v.consequent} refuted")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"seed": args.seed, "verdicts": rows}, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")
    return 1 if (mismatches or violations) else 0


if __name__ == "__main__":
    sys.exit(main())
