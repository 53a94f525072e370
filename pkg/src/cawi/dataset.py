"""Tabular data loading, standardization, label encoding, and stratified
cross-validation splits with a train-only preprocessing guarantee."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import RngStream

__all__ = [
    "Dataset",
    "FoldSplit",
    "ScalerParams",
    "load_csv",
    "fit_standardizer",
    "apply_standardizer",
    "one_hot",
    "stratified_kfold",
]

CONSTANT_STD = 1.0  # sentinel stddev for constant columns: transform becomes shift-only


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray      # m x d, float
    labels: np.ndarray        # length m, ints in [0, n_class)
    feature_names: list[str]
    n_class: int
    name: str = ""

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class FoldSplit:
    fold_index: int
    train_rows: np.ndarray
    test_rows: np.ndarray


@dataclass(frozen=True)
class ScalerParams:
    means: np.ndarray
    stddevs: np.ndarray
    constant: np.ndarray      # boolean mask of constant columns


def load_csv(path, label_column) -> Dataset:
    """Load a UTF-8, header-first CSV into a Dataset.

    ``label_column`` is a header name or zero-based column index. Labels
    are treated as categorical tokens and re-indexed densely in
    first-appearance order.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = list(reader)

    header = [h.strip() for h in header]
    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        label_idx = int(label_column)
        if label_idx < 0:
            label_idx += len(header)
        if not 0 <= label_idx < len(header):
            raise ValueError(f"label column index {label_column} out of range for {len(header)} columns")
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise ValueError(f"label column {label_column!r} not found in header {header}") from None

    feature_names = [h for i, h in enumerate(header) if i != label_idx]
    features = []
    tokens = []
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"row {r + 1}: expected {len(header)} cells, got {len(row)}")
        vals = []
        for c, cell in enumerate(row):
            cell = cell.strip()
            if c == label_idx:
                if cell == "":
                    raise ValueError(f"row {r + 1}, column {header[c]!r}: missing label")
                tokens.append(cell)
                continue
            if cell == "":
                raise ValueError(f"row {r + 1}, column {header[c]!r}: missing value")
            try:
                v = float(cell)
            except ValueError:
                raise ValueError(
                    f"row {r + 1}, column {header[c]!r}: cannot parse {cell!r} as a number"
                ) from None
            if not np.isfinite(v):
                raise ValueError(f"row {r + 1}, column {header[c]!r}: non-finite value")
            vals.append(v)
        features.append(vals)

    if len(features) < 2:
        raise ValueError(f"{path}: need at least 2 rows, got {len(features)}")

    index = {}
    labels = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        if tok not in index:
            index[tok] = len(index)
        labels[i] = index[tok]
    if len(index) < 2:
        raise ValueError(f"{path}: dataset has a single class {list(index)!r}")

    import os
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return Dataset(features=np.asarray(features, dtype=float), labels=labels,
                   feature_names=feature_names, n_class=len(index), name=name)


def fit_standardizer(data: Dataset, rows) -> ScalerParams:
    """Column means and population stddevs over the selected rows only."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("fit_standardizer requires a nonempty row list")
    X = data.features[rows]
    means = X.mean(axis=0)
    stds = X.std(axis=0)  # population (1/n) denominator
    constant = stds == 0.0
    stds = np.where(constant, CONSTANT_STD, stds)
    return ScalerParams(means=means, stddevs=stds, constant=constant)


def apply_standardizer(params: ScalerParams, features: np.ndarray) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.shape[1] != params.means.shape[0]:
        raise ValueError(
            f"feature count {X.shape[1]} does not match scaler dimension {params.means.shape[0]}"
        )
    out = (X - params.means) / params.stddevs
    if np.any(params.constant):
        out[:, params.constant] = 0.0
    return out


def one_hot(labels, n_class: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_class):
        bad = labels[(labels < 0) | (labels >= n_class)][0]
        raise ValueError(f"label {bad} out of range [0, {n_class})")
    Y = np.zeros((labels.shape[0], n_class))
    Y[np.arange(labels.shape[0]), labels] = 1.0
    return Y


def stratified_kfold(data: Dataset, k: int, seed: int) -> list[FoldSplit]:
    """Deterministic stratified k-fold: per-class seeded shuffle, then
    round-robin assignment of each class's rows to test folds."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > data.m:
        raise ValueError(f"k={k} exceeds number of rows m={data.m}")

    rng = RngStream(seed).substream("folds")
    test_sets: list[list[int]] = [[] for _ in range(k)]
    for c in range(data.n_class):
        idx = np.flatnonzero(data.labels == c)
        if idx.size < k:
            warnings.warn(f"class {c} has only {idx.size} members for k={k} folds")
        order = idx[rng.substream("class", c).permutation(idx.size)]
        for pos, row in enumerate(order):
            test_sets[pos % k].append(int(row))

    all_rows = np.arange(data.m)
    splits = []
    for f in range(k):
        test = np.sort(np.asarray(test_sets[f], dtype=np.int64))
        train = np.setdiff1d(all_rows, test)
        splits.append(FoldSplit(fold_index=f, train_rows=train, test_rows=test))
    return splits
