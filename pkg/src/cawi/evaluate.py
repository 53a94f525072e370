"""Benchmark harness: cross-validated grid search per initializer,
improvement tables, multi-seed repetition, Wilcoxon signed-rank
significance, and timing overhead measurement."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .copula import fit_copula, independence_model
from .dataset import (Dataset, apply_standardizer, fit_standardizer, one_hot,
                      stratified_kfold)
from .dependence import pseudo_observations, tau_matrix
from .numerics import RngStream
from .rdnn import ArchSpec, predict, sample_arch_inits, train

__all__ = [
    "DEFAULT_LAMBDAS",
    "DEFAULT_NODES",
    "DEFAULT_ACTIVATIONS",
    "DEFAULT_FAMILIES",
    "FAMILY_LABELS",
    "GridSpec",
    "FamilyResult",
    "EvalReport",
    "WilcoxonResult",
    "run_cv",
    "evaluate_dataset",
    "multi_seed",
    "wilcoxon_signed_rank",
    "measure_timing",
    "render_table",
    "report_to_dict",
    "report_csv_rows",
]

DEFAULT_LAMBDAS = tuple(10.0 ** i for i in range(-6, 7))
DEFAULT_NODES = tuple(range(3, 204, 20))
DEFAULT_ACTIVATIONS = ("sigmoid", "sine", "tribas", "radbas", "tansig", "relu", "selu")
DEFAULT_FAMILIES = ("iid", "gaussian", "student_t", "clayton", "frank", "gumbel")

FAMILY_LABELS = {"iid": "iid", "gaussian": "Gaussian", "student_t": "t",
                 "clayton": "Clayton", "frank": "Frank", "gumbel": "Gumbel"}


@dataclass(frozen=True)
class GridSpec:
    lambdas: tuple = DEFAULT_LAMBDAS
    node_counts: tuple = DEFAULT_NODES
    activations: tuple = DEFAULT_ACTIVATIONS
    families: tuple = DEFAULT_FAMILIES

    def __post_init__(self):
        if not (self.lambdas and self.node_counts and self.activations and self.families):
            raise ValueError("grid lists must be nonempty")
        if "iid" not in self.families:
            raise ValueError("the iid baseline must be part of the family list")

    def points(self):
        """Declared enumeration order: lambda outer, nodes middle, activation inner."""
        return list(itertools.product(self.lambdas, self.node_counts, self.activations))


@dataclass
class FamilyResult:
    family: str
    mean_accuracy: float                # percent
    per_fold_accuracy: list
    best_lambda: float
    best_nodes: int
    best_activation: str
    mean_train_time: float              # seconds, best grid point
    clamped: bool = False
    subsampled: bool = False
    failed_grid_points: list = field(default_factory=list)


@dataclass
class EvalReport:
    dataset: str
    arch_kind: str
    seed: int
    k: int
    rows: list                           # FamilyResult per family, grid order
    improvement: float                   # best non-iid accuracy minus iid accuracy


@dataclass(frozen=True)
class WilcoxonResult:
    W_plus: float
    n_effective: int
    p_value: float


def _fit_fold_models(data: Dataset, family: str, folds, seed: int, m_cap: int):
    """Per-fold scaler + copula model, computed from train rows only."""
    master = RngStream(seed)
    fold_models = []
    for split in folds:
        scaler = fit_standardizer(data, split.train_rows)
        Xtr = apply_standardizer(scaler, data.features[split.train_rows])
        if family == "iid":
            model = independence_model(data.d)
        else:
            U = pseudo_observations(Xtr)
            tm = tau_matrix(U, m_cap=m_cap,
                            rng=master.substream("tau", split.fold_index))
            model = fit_copula(family, U, tm)
        fold_models.append((scaler, model))
    return fold_models


def run_cv(data: Dataset, arch: ArchSpec, family: str, grid: GridSpec,
           k: int = 5, seed: int = 42, m_cap: int = 2000,
           marginal: str = "uniform_pm1", cawi_all_layers: bool = False) -> FamilyResult:
    """Grid-search one initializer family under stratified k-fold CV.

    All preprocessing (standardization, pseudo-observations, copula fit)
    uses each fold's training rows only. Randomness is derived from
    (seed, fold, grid index) substreams so execution order cannot change
    results. Returns the grid point with maximal mean test accuracy;
    ties break to the first point in declared order.
    """
    folds = stratified_kfold(data, k, seed)
    fold_models = _fit_fold_models(data, family, folds, seed, m_cap)
    law = "uniform_pm1" if family == "iid" else marginal
    master = RngStream(seed)
    points = grid.points()

    best = None  # (mean_acc, grid_index, point, per_fold, mean_time)
    failed = []
    for g, (lam, nodes, act) in enumerate(points):
        arch_g = replace(arch.with_nodes(nodes), lam=lam, activation=act)
        accs = []
        times = []
        try:
            for split, (scaler, model) in zip(folds, fold_models):
                Xtr = apply_standardizer(scaler, data.features[split.train_rows])
                Xte = apply_standardizer(scaler, data.features[split.test_rows])
                Ytr = one_hot(data.labels[split.train_rows], data.n_class)
                wrng = master.substream("weights", split.fold_index, g)
                t0 = time.perf_counter()
                inits = sample_arch_inits(arch_g, data.d, model, law, wrng,
                                          X=Xtr, cawi_all_layers=cawi_all_layers,
                                          m_cap=m_cap)
                trained = train(arch_g, Xtr, Ytr, inits, scaler)
                times.append(time.perf_counter() - t0)
                pred = predict(trained, Xte)
                accs.append(float(np.mean(pred == data.labels[split.test_rows])))
        except (np.linalg.LinAlgError, ValueError) as exc:
            failed.append({"lambda": lam, "nodes": nodes, "activation": act,
                           "error": str(exc)})
            continue
        mean_acc = 100.0 * float(np.mean(accs))
        if best is None or mean_acc > best[0] + 1e-12:
            best = (mean_acc, g, (lam, nodes, act),
                    [100.0 * a for a in accs], float(np.mean(times)))

    if best is None:
        raise RuntimeError(f"every grid point failed for family {family!r}")

    mean_acc, _, (lam, nodes, act), per_fold, mean_time = best
    any_clamped = any(m.diagnostics.get("clamped", False) for _, m in fold_models)
    any_sub = any(m.diagnostics.get("subsampled", False) for _, m in fold_models)
    return FamilyResult(family=family, mean_accuracy=mean_acc,
                        per_fold_accuracy=per_fold, best_lambda=lam,
                        best_nodes=nodes, best_activation=act,
                        mean_train_time=mean_time, clamped=any_clamped,
                        subsampled=any_sub, failed_grid_points=failed)


def evaluate_dataset(data: Dataset, arch: ArchSpec, grid: GridSpec,
                     k: int = 5, seed: int = 42, m_cap: int = 2000,
                     marginal: str = "uniform_pm1",
                     cawi_all_layers: bool = False) -> EvalReport:
    """run_cv over every family in the grid, plus the improvement column."""
    rows = [run_cv(data, arch, fam, grid, k=k, seed=seed, m_cap=m_cap,
                   marginal=marginal, cawi_all_layers=cawi_all_layers)
            for fam in grid.families]
    by_family = {r.family: r for r in rows}
    iid_acc = by_family["iid"].mean_accuracy
    non_iid = [r.mean_accuracy for r in rows if r.family != "iid"]
    improvement = (max(non_iid) - iid_acc) if non_iid else 0.0
    return EvalReport(dataset=data.name, arch_kind=arch.kind, seed=seed, k=k,
                      rows=rows, improvement=improvement)


def multi_seed(data: Dataset, arch: ArchSpec, grid: GridSpec, seeds,
               k: int = 5, m_cap: int = 2000, marginal: str = "uniform_pm1"):
    """One full report per seed plus a per-family mean/sd summary."""
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("multi_seed requires at least two seeds")
    reports = [evaluate_dataset(data, arch, grid, k=k, seed=s, m_cap=m_cap,
                                marginal=marginal) for s in seeds]
    summary = {}
    for fam in grid.families:
        accs = np.array([next(r for r in rep.rows if r.family == fam).mean_accuracy
                         for rep in reports])
        summary[fam] = {"mean": float(accs.mean()), "sd": float(accs.std(ddof=0))}
    return reports, summary


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test

def _midranks(values: np.ndarray) -> np.ndarray:
    from scipy.stats import rankdata
    return rankdata(values)


def wilcoxon_signed_rank(diffs, alternative: str = "greater") -> WilcoxonResult:
    """Wilcoxon signed-rank test on paired differences.

    Zero differences are dropped, tied magnitudes receive midranks, and
    the p-value is exact by sign-pattern enumeration for n <= 12, with a
    tie- and continuity-corrected normal approximation above that.
    """
    diffs = np.asarray(diffs, dtype=float)
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        raise ValueError("all differences are zero")

    ranks = _midranks(np.abs(diffs))
    w_plus = float(np.sum(ranks[diffs > 0.0]))

    if n <= 12:
        sums = np.zeros(1)
        for r in ranks:
            sums = np.concatenate([sums, sums + r])
        total = sums.size
        p_greater = float(np.sum(sums >= w_plus - 1e-9)) / total
        p_less = float(np.sum(sums <= w_plus + 1e-9)) / total
    else:
        mu = n * (n + 1) / 4.0
        _, counts = np.unique(ranks, return_counts=True)
        tie_corr = float(np.sum(counts ** 3 - counts)) / 48.0
        sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_corr)
        z_greater = (w_plus - mu - 0.5) / sigma
        z_less = (w_plus - mu + 0.5) / sigma
        p_greater = float(special.ndtr(-z_greater))
        p_less = float(special.ndtr(z_less))

    if alternative == "greater":
        p = p_greater
    elif alternative == "less":
        p = p_less
    elif alternative == "two-sided":
        p = min(1.0, 2.0 * min(p_greater, p_less))
    else:
        raise ValueError(f"unknown alternative {alternative!r}")
    return WilcoxonResult(W_plus=w_plus, n_effective=n, p_value=min(max(p, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Timing

def measure_timing(data: Dataset, families, arch: ArchSpec, reps: int = 5,
                   seed: int = 42, m_cap: int = 2000,
                   marginal: str = "uniform_pm1") -> dict:
    """Wall-clock around copula fit + weight sampling + closed-form train.

    One warm-up repetition per family is discarded; the mean and standard
    deviation of the remaining ``reps`` timings are reported.
    """
    if reps < 3:
        raise ValueError("reps must be at least 3")
    rows = np.arange(data.m)
    scaler = fit_standardizer(data, rows)
    X = apply_standardizer(scaler, data.features)
    Y = one_hot(data.labels, data.n_class)
    master = RngStream(seed)

    out = {}
    for family in families:
        law = "uniform_pm1" if family == "iid" else marginal
        samples = []
        for rep in range(reps + 1):  # first one is the warm-up
            rng = master.substream("timing", family, rep)
            t0 = time.perf_counter()
            if family == "iid":
                model = independence_model(data.d)
            else:
                U = pseudo_observations(X)
                tm = tau_matrix(U, m_cap=m_cap, rng=rng.substream("tau"))
                model = fit_copula(family, U, tm)
            inits = sample_arch_inits(arch, data.d, model, law, rng)
            train(arch, X, Y, inits, scaler)
            elapsed = time.perf_counter() - t0
            if rep > 0:
                samples.append(elapsed)
        arr = np.asarray(samples)
        out[family] = {"mean": float(arr.mean()), "sd": float(arr.std(ddof=0))}
    return out


# ---------------------------------------------------------------------------
# Report rendering

def _fmt(acc: float) -> str:
    return f"{acc:.4f}"


def render_table(report: EvalReport) -> str:
    """Improvement table: one row per dataset, family columns, improvement last."""
    headers = ["Dataset"] + [FAMILY_LABELS.get(r.family, r.family) for r in report.rows]
    headers.append("Improvement")
    cells = [report.dataset] + [_fmt(r.mean_accuracy) for r in report.rows]
    sign = "+" if report.improvement >= 0 else ""
    cells.append(f"{sign}{report.improvement:.4f}")
    widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
    line = lambda items: "  ".join(s.ljust(w) for s, w in zip(items, widths))
    return line(headers) + "\n" + line(cells)


def report_to_dict(report: EvalReport, include_timings: bool = False) -> dict:
    """JSON document; timing values are excluded by default so that report
    bytes are a pure function of (data, config, seed)."""
    rows = []
    for r in report.rows:
        row = {
            "family": r.family,
            "mean_accuracy": r.mean_accuracy,
            "per_fold_accuracy": list(r.per_fold_accuracy),
            "best": {"lambda": r.best_lambda, "nodes": r.best_nodes,
                     "activation": r.best_activation},
            "flags": {"clamped": r.clamped, "subsampled": r.subsampled},
            "failed_grid_points": list(r.failed_grid_points),
        }
        if include_timings:
            row["mean_train_time"] = r.mean_train_time
        rows.append(row)
    return {
        "schema": "cawi-report/1",
        "dataset": report.dataset,
        "arch": report.arch_kind,
        "seed": report.seed,
        "k": report.k,
        "improvement": report.improvement,
        "rows": rows,
    }


def report_csv_rows(report: EvalReport) -> list[list]:
    """CSV rows (with header): one row per (dataset, family)."""
    out = [["dataset", "family", "mean_accuracy", "best_lambda", "best_nodes",
            "best_activation", "clamped", "subsampled", "improvement"]]
    for r in report.rows:
        out.append([report.dataset, r.family, _fmt(r.mean_accuracy),
                    repr(r.best_lambda), r.best_nodes, r.best_activation,
                    int(r.clamped), int(r.subsampled),
                    _fmt(report.improvement)])
    return out
