"""Regenerate the CSVs bundled under src/cawi/data/.

iris.csv comes from scikit-learn's copy of the classic UCI table; the two
synthetic sets plant known Clayton / Gaussian dependence between features
and carry class-dependent mean shifts so they are learnable.
"""

import csv
from pathlib import Path

import numpy as np

from cawi.copula import CopulaModel, sample_copula
from cawi.numerics import RngStream, std_normal_quantile

OUT = Path(__file__).resolve().parents[1] / "src" / "cawi" / "data"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def make_iris():
    from sklearn.datasets import load_iris
    data = load_iris()
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
    rows = []
    for x, y in zip(data.data, data.target):
        rows.append([f"{v:.1f}" for v in x] + [data.target_names[y]])
    write_csv(OUT / "iris.csv", header, rows)


def make_synthetic(name, model, seed, n_per_class=80, n_class=3, shift=1.0):
    rng = RngStream(seed)
    d = model.d
    rows = []
    shifts = rng.standard_normal(size=(n_class, d)) * shift
    for c in range(n_class):
        u = sample_copula(model, n_per_class, rng.substream("class", c))
        z = std_normal_quantile(u)
        x = z + shifts[c]
        for row in x:
            rows.append([f"{v:.6f}" for v in row] + [f"c{c}"])
    header = [f"f{j}" for j in range(d)] + ["label"]
    write_csv(OUT / f"{name}.csv", header, rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    make_iris()
    make_synthetic("synthetic_clayton",
                   CopulaModel(family="clayton", d=6, theta=2.0), seed=2026)
    R = np.full((6, 6), 0.7)
    np.fill_diagonal(R, 1.0)
    make_synthetic("synthetic_gaussian",
                   CopulaModel(family="gaussian", d=6, R=R), seed=2027)


if __name__ == "__main__":
    main()
