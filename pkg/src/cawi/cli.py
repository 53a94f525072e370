"""Command-line frontend: fit / sample / bench / report subcommands."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import copula, evaluate, weights
from .dataset import load_csv
from .dependence import pseudo_observations, tau_matrix
from .evaluate import GridSpec, evaluate_dataset, render_table
from .numerics import RngStream
from .rdnn import ACTIVATIONS, ArchSpec


def _version() -> str:
    try:
        return metadata.version("cawi")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"


def _parse_floats(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok)


def _parse_ints(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok)


def _parse_names(text: str) -> tuple:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _write_manifest(outdir: Path, args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {"version": _version(), "config": config}
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_fit(args) -> int:
    data = load_csv(args.data, args.label_col)
    U = pseudo_observations(data.features)
    tm = tau_matrix(U, m_cap=args.m_cap, rng=RngStream(args.seed).substream("tau"))
    model = copula.fit_copula(args.family, U, tm)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"copula_{args.family}.json"
    copula.save_model(model, path)
    _write_manifest(outdir, args)

    print(f"family   : {model.family}")
    print(f"bar_tau  : {tm.bar_tau:.6f}")
    if model.theta is not None:
        print(f"theta    : {model.theta:.6f}")
    if model.nu is not None:
        print(f"nu       : {model.nu:g}")
    if model.R is not None:
        print(f"R[0,1]   : {model.R[0, 1]:.6f}" if model.d > 1 else "R        : 1x1")
    flags = [k for k in ("clamped", "subsampled") if model.diagnostics.get(k)]
    print(f"flags    : {', '.join(flags) if flags else 'none'}")
    print(f"written  : {path}")
    return 0


def cmd_sample(args) -> int:
    model = copula.load_model(args.copula)
    if model.d != args.d:
        print(f"error: copula dimension {model.d} does not match --d {args.d}",
              file=sys.stderr)
        return 2
    law = "std_normal" if args.marginal == "normal" else "uniform_pm1"
    rng = RngStream(args.seed).substream("sample")
    init = weights.sample_weight_init(model, args.d, args.h, law, rng)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "weight_init.json"
    weights.save_init(init, path)
    _write_manifest(outdir, args)
    print(f"written  : {path}  (W {args.d}x{args.h}, marginal {law})")
    return 0


def _bench_grid(args) -> GridSpec:
    return GridSpec(
        lambdas=_parse_floats(args.lambda_grid) if args.lambda_grid else evaluate.DEFAULT_LAMBDAS,
        node_counts=_parse_ints(args.nodes_grid) if args.nodes_grid else evaluate.DEFAULT_NODES,
        activations=_parse_names(args.activations) if args.activations else evaluate.DEFAULT_ACTIVATIONS,
        families=_parse_names(args.families) if args.families else evaluate.DEFAULT_FAMILIES,
    )


def cmd_bench(args) -> int:
    grid = _bench_grid(args)
    for act in grid.activations:
        if act not in ACTIVATIONS:
            print(f"error: unknown activation {act!r}", file=sys.stderr)
            return 2
    seeds = _parse_ints(args.seeds)
    law = "std_normal" if args.marginal == "normal" else "uniform_pm1"
    arch = ArchSpec(kind=args.arch)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_manifest(outdir, args)

    n_failed = 0
    for path in args.data:
        try:
            data = load_csv(path, args.label_col)
        except (OSError, ValueError) as exc:
            print(f"error loading {path}: {exc}", file=sys.stderr)
            n_failed += 1
            continue
        for seed in seeds:
            try:
                report = evaluate_dataset(data, arch, grid, k=args.k, seed=seed,
                                          m_cap=args.m_cap, marginal=law)
            except Exception as exc:  # noqa: BLE001 - keep the run going
                print(f"error benchmarking {data.name} seed {seed}: {exc}",
                      file=sys.stderr)
                n_failed += 1
                continue
            stem = f"report_{data.name}_seed{seed}"
            with open(outdir / f"{stem}.json", "w", encoding="utf-8") as fh:
                json.dump(evaluate.report_to_dict(report), fh, indent=2, sort_keys=True)
                fh.write("\n")
            with open(outdir / f"{stem}.csv", "w", encoding="utf-8", newline="") as fh:
                csv.writer(fh).writerows(evaluate.report_csv_rows(report))
            with open(outdir / f"{stem}_timings.json", "w", encoding="utf-8") as fh:
                json.dump({r.family: r.mean_train_time for r in report.rows},
                          fh, indent=2, sort_keys=True)
                fh.write("\n")
            print(render_table(report))
            print()
    if n_failed and n_failed == len(args.data) * max(1, len(seeds)):
        return 1
    return 0


def cmd_report(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != "cawi-report/1":
        print(f"error: unrecognized report schema {doc.get('schema')!r}", file=sys.stderr)
        return 2
    rows = doc["rows"]
    headers = ["Dataset"] + [evaluate.FAMILY_LABELS.get(r["family"], r["family"])
                             for r in rows] + ["Improvement"]
    cells = [doc["dataset"]] + [f"{r['mean_accuracy']:.4f}" for r in rows]
    sign = "+" if doc["improvement"] >= 0 else ""
    cells.append(f"{sign}{doc['improvement']:.4f}")
    widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
    print("  ".join(s.ljust(w) for s, w in zip(headers, widths)))
    print("  ".join(s.ljust(w) for s, w in zip(cells, widths)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cawi",
                                     description="Copula-aligned weight initialization "
                                                 "for randomized neural networks")
    default_threads = int(os.environ.get("CAWI_THREADS", "1"))
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a copula to a dataset's features")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--label-col", default=-1)
    p_fit.add_argument("--family", default="gaussian",
                       choices=[f for f in copula.FAMILIES if f != "independence"])
    p_fit.add_argument("--m-cap", type=int, default=2000)
    p_fit.add_argument("--seed", type=int, default=42)
    p_fit.add_argument("--out", default="out")
    p_fit.set_defaults(func=cmd_fit)

    p_sample = sub.add_parser("sample", help="sample frozen weights from a fitted copula")
    p_sample.add_argument("--copula", required=True)
    p_sample.add_argument("--d", type=int, required=True)
    p_sample.add_argument("--h", type=int, required=True)
    p_sample.add_argument("--marginal", default="uniform", choices=["uniform", "normal"])
    p_sample.add_argument("--seed", type=int, default=42)
    p_sample.add_argument("--out", default="out")
    p_sample.set_defaults(func=cmd_sample)

    p_bench = sub.add_parser("bench", help="cross-validated benchmark with grid search")
    p_bench.add_argument("--data", nargs="+", required=True)
    p_bench.add_argument("--label-col", default=-1)
    p_bench.add_argument("--arch", default="rvfl", choices=["rvfl", "elm", "drvfl", "bls"])
    p_bench.add_argument("--families", default=None)
    p_bench.add_argument("--marginal", default="uniform", choices=["uniform", "normal"])
    p_bench.add_argument("--k", type=int, default=5)
    p_bench.add_argument("--seeds", default="42")
    p_bench.add_argument("--m-cap", type=int, default=2000)
    p_bench.add_argument("--lambda-grid", default=None)
    p_bench.add_argument("--nodes-grid", default=None)
    p_bench.add_argument("--activations", default=None)
    p_bench.add_argument("--out", default="out")
    p_bench.add_argument("--threads", type=int, default=default_threads)
    p_bench.set_defaults(func=cmd_bench)

    p_report = sub.add_parser("report", help="re-render a JSON report as a table")
    p_report.add_argument("input")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
