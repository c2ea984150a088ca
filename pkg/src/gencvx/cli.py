"""Command line interface.

Verbs:
    analyze   classify one function (corpus member or DSL source) and write
              a JSON report; exit 0 when nothing is refuted, 2 on refutation,
              1 on error.
    bcurve    emit the interpolation-coefficient curve b(lambda) as CSV.
    corpus    classify every corpus member against its ground-truth labels;
              exit 0 on full agreement, 3 on insufficient sampling, 4 on a
              label mismatch.

`--config FILE` loads a JSON RunConfig; explicit flags override file fields.
The environment variable GENCVX_SEED is the seed fallback when no --seed is
given anywhere.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .campaign import HOLDS, REFUTED, classify
from .checks import compute_b
from .functions import PROPERTIES, corpus, corpus_entry, function_from_expression
from .geometry import parse_region
from .report import Report, RunConfig

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2
EXIT_INSUFFICIENT = 3
EXIT_MISMATCH = 4

_CONFIG_FLAGS = (
    "corpus_name", "function_source", "dimension", "region_text", "properties",
    "pair_count", "lambda_grid", "refinement_rounds", "seed",
    "clarke_steps", "clarke_probes", "subdiff_radius", "subdiff_count",
)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _resolve_config(args) -> RunConfig:
    base: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            base = json.load(fh)
        RunConfig.from_dict(base)  # reject unknown keys early
    overrides = {
        "corpus_name": args.corpus,
        "function_source": args.function,
        "dimension": args.dim,
        "region_text": args.region,
        "properties": tuple(args.properties.split(",")) if args.properties else None,
        "pair_count": args.samples,
        "lambda_grid": args.lambda_grid,
        "refinement_rounds": args.refine_rounds,
        "seed": args.seed,
        "clarke_steps": args.clarke_steps,
        "clarke_probes": args.clarke_probes,
        "subdiff_radius": args.subdiff_radius,
        "subdiff_count": args.subdiff_count,
    }
    merged = dict(base)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    if merged.get("seed") is None:
        env = os.environ.get("GENCVX_SEED")
        merged["seed"] = int(env) if env else 0
    merged = {k: v for k, v in merged.items() if k in _CONFIG_FLAGS and v is not None}
    return RunConfig.from_dict(merged)


def _load_target(config: RunConfig):
    if config.corpus_name is not None:
        entry = corpus_entry(config.corpus_name)
        return entry.handle, entry.region
    fn = function_from_expression(config.function_source, config.dimension)
    region = parse_region(config.region_text, config.dimension)
    return fn, region


def _print_summary(verdicts) -> None:
    for v in verdicts:
        print(
            f"{v.property:28s} {v.verdict:17s} "
            f"witnesses={len(v.witnesses)} max_residual={v.max_residual:.6g}"
        )


def cmd_analyze(args) -> int:
    config = _resolve_config(args)
    fn, region = _load_target(config)
    verdicts = classify(fn, region, config.properties, config.plan())
    report = Report(
        config=config,
        verdicts=tuple(verdicts),
        workload={
            "pairs": config.pair_count,
            "lambda_grid": config.lambda_grid,
            "properties": len(config.properties),
        },
    )
    out = args.out or "report.json"
    text = report.to_json()
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"function: {fn.name}")
    _print_summary(verdicts)
    print(f"report: {out}")
    return EXIT_REFUTED if report.any_refuted() else EXIT_OK


def _parse_point(text: str, dimension: int) -> np.ndarray:
    vals = [float(t) for t in text.split(",")]
    if len(vals) != dimension:
        raise ValueError(f"point {text!r} has {len(vals)} coordinates, need {dimension}")
    return np.array(vals)


def cmd_bcurve(args) -> int:
    config = _resolve_config(args)
    fn, region = _load_target(config)
    x = _parse_point(args.x, fn.dimension)
    y = _parse_point(args.y, fn.dimension)
    for name, p in (("x", x), ("y", y)):
        if not region.contains(p):
            raise ValueError(f"point {name}={p.tolist()} is outside the region")
    grid = args.grid
    lines = ["lambda,b,lambda_b,strict,weak,degenerate"]
    for k in range(1, grid + 1):
        lam = k / (grid + 1)
        rec = compute_b(fn, x, y, lam)
        lines.append(
            ",".join(
                (
                    _fmt(lam),
                    _fmt(rec.b),
                    _fmt(rec.lam_b),
                    str(rec.strict).lower(),
                    str(rec.weak).lower(),
                    str(rec.degenerate).lower(),
                )
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"curve: {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_corpus(args, label_overrides: dict[str, dict[str, bool]] | None = None) -> int:
    config_seed = args.seed
    if config_seed is None:
        env = os.environ.get("GENCVX_SEED")
        config_seed = int(env) if env else 0
    mismatches: list[str] = []
    starved: list[str] = []
    results = {}
    for entry in corpus():
        config = RunConfig(
            corpus_name=entry.handle.name,
            properties=PROPERTIES,
            pair_count=args.samples if args.samples is not None else 200,
            lambda_grid=args.lambda_grid if args.lambda_grid is not None else 33,
            refinement_rounds=args.refine_rounds if args.refine_rounds is not None else 3,
            seed=config_seed,
            subdiff_radius=args.subdiff_radius if args.subdiff_radius is not None else 1e-5,
            subdiff_count=args.subdiff_count,
        )
        verdicts = classify(entry.handle, entry.region, PROPERTIES, config.plan())
        labels = dict(entry.labels)
        if label_overrides and entry.handle.name in label_overrides:
            labels.update(label_overrides[entry.handle.name])
        results[entry.handle.name] = {
            "verdicts": {v.property: v.verdict for v in verdicts},
            "labels": labels,
            "config": config.to_dict(),
        }
        print(f"-- {entry.handle.name}")
        for v in verdicts:
            expected = HOLDS if labels[v.property] else REFUTED
            status = "ok"
            if v.verdict == "inconclusive":
                status = "insufficient"
                starved.append(f"{entry.handle.name}/{v.property}")
            elif v.verdict != expected:
                status = f"MISMATCH (expected {expected})"
                mismatches.append(
                    f"{entry.handle.name}/{v.property}: verdict={v.verdict} expected={expected}"
                )
            print(f"   {v.property:28s} {v.verdict:17s} [{status}]")

    if args.out:
        doc = {
            "schema_version": "v1",
            "kind": "corpus",
            "seed": config_seed,
            "entries": results,
            "mismatches": mismatches,
            "insufficient": starved,
        }
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        print(f"report: {args.out}")

    if mismatches:
        print("label mismatches:")
        for m in mismatches:
            print(f"  {m}")
        return EXIT_MISMATCH
    if starved:
        print(f"insufficient sampling for {len(starved)} verdict(s)")
        return EXIT_INSUFFICIENT
    print("corpus verdicts match all ground-truth labels")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, help="JSON config file (flags override)")
    p.add_argument("--corpus", type=str, help="corpus function name")
    p.add_argument("--function", type=str, help="DSL source, e.g. 'x2/x1'")
    p.add_argument("--dim", type=int, help="dimension for --function")
    p.add_argument("--region", type=str, help="region text, e.g. 'x1 > 0.05, box(0..2, -1..1)'")
    p.add_argument("--properties", type=str, help="comma-separated property list")
    p.add_argument("--samples", type=int, help="point pairs per property (default 200)")
    p.add_argument("--lambda-grid", dest="lambda_grid", type=int, help="lambda grid size (default 33)")
    p.add_argument("--refine-rounds", dest="refine_rounds", type=int, help="refinement rounds (default 3)")
    p.add_argument("--seed", type=int, help="campaign seed (env GENCVX_SEED, then 0)")
    p.add_argument("--clarke-steps", dest="clarke_steps", type=int, help="step-scale count (default 9)")
    p.add_argument("--clarke-probes", dest="clarke_probes", type=int, help="probes per scale (default 64)")
    p.add_argument("--subdiff-radius", dest="subdiff_radius", type=float, help="sampling radius (default 1e-5)")
    p.add_argument("--subdiff-count", dest="subdiff_count", type=int, help="gradient samples (default max(8, 2n+1))")
    p.add_argument("--out", type=str, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gencvx",
        description="Certify at samples, or refute with witnesses, generalized "
        "convexity properties of functions on convex regions.",
    )
    sub = parser.add_subparsers(dest="command")

    pa = sub.add_parser("analyze", help="classify one function")
    _add_common(pa)

    pb = sub.add_parser("bcurve", help="emit b(lambda) as CSV")
    _add_common(pb)
    pb.add_argument("--x", type=str, required=True, help="first point, comma-separated")
    pb.add_argument("--y", type=str, required=True, help="second point, comma-separated")
    pb.add_argument("--grid", type=int, default=9, help="interior lambda count (default 9)")

    pc = sub.add_parser("corpus", help="verify corpus members against their labels")
    _add_common(pc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_OK
    try:
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "bcurve":
            return cmd_bcurve(args)
        if args.command == "corpus":
            return cmd_corpus(args)
    except (ValueError, KeyError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    parser.print_help()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
