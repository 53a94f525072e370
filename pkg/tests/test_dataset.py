import numpy as np
import pytest

from cawi.dataset import (Dataset, apply_standardizer, fit_standardizer,
                          load_csv, one_hot, stratified_kfold)


@pytest.fixture
def csv_file(tmp_path):
    p = tmp_path / "toy.csv"
    p.write_text(
        "f1,f2,label\n"
        "1.0,2.0,cat\n"
        "3.0,4.0,dog\n"
        "5.0,6.0,cat\n"
        "7.0,8.0,bird\n"
    )
    return p


def make_dataset(y):
    y = np.asarray(y, dtype=np.int64)
    X = np.arange(y.size * 2, dtype=float).reshape(y.size, 2)
    return Dataset(features=X, labels=y,
                   feature_names=["a", "b"], n_class=int(y.max()) + 1)


class TestLoadCsv:
    def test_basic(self, csv_file):
        ds = load_csv(csv_file, label_column=2)
        assert ds.features.shape == (4, 2)
        assert ds.features.dtype == np.float64
        assert ds.feature_names == ["f1", "f2"]
        # labels re-indexed in first-appearance order: cat=0, dog=1, bird=2
        assert list(ds.labels) == [0, 1, 0, 2]
        assert ds.n_class == 3
        assert ds.name == "toy"

    def test_negative_label_column(self, csv_file):
        a = load_csv(csv_file, label_column=2)
        b = load_csv(csv_file, label_column=-1)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_label_column_by_name(self, csv_file):
        ds = load_csv(csv_file, label_column="label")
        assert list(ds.labels) == [0, 1, 0, 2]
        assert ds.feature_names == ["f1", "f2"]

    def test_nonfloat_cell_reports_location(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,label\n1.0,oops,x\n2.0,3.0,y\n")
        with pytest.raises(ValueError, match="'b'"):
            load_csv(p, label_column=-1)

    def test_ragged_row_rejected(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("a,b,label\n1.0,2.0,x\n1.0,y\n")
        with pytest.raises(ValueError, match="row 2"):
            load_csv(p, label_column=-1)

    def test_single_class_rejected(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("a,label\n1.0,x\n2.0,x\n")
        with pytest.raises(ValueError, match="single class"):
            load_csv(p, label_column=-1)

    def test_missing_header_name_rejected(self, csv_file):
        with pytest.raises(ValueError, match="not found"):
            load_csv(csv_file, label_column="nope")

    def test_bundled_iris(self):
        import importlib.resources as res
        with res.as_file(res.files("cawi.data") / "iris.csv") as p:
            ds = load_csv(p, label_column=-1)
        assert ds.features.shape == (150, 4)
        assert ds.n_class == 3
        assert list(np.bincount(ds.labels)) == [50, 50, 50]


class TestStandardizer:
    def test_train_rows_only(self):
        X = np.random.default_rng(0).normal(5.0, 3.0, size=(500, 4))
        ds = Dataset(features=X, labels=np.zeros(500, dtype=np.int64) % 2,
                     feature_names=list("abcd"), n_class=2)
        rows = np.arange(300)
        sc = fit_standardizer(ds, rows)
        Z = apply_standardizer(sc, X[rows])
        assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(Z.std(axis=0), 1.0, atol=1e-12)
        # held-out rows are transformed with train statistics, not their own
        Zout = apply_standardizer(sc, X[300:])
        assert np.allclose(Zout, (X[300:] - sc.means) / sc.stddevs)

    def test_population_std(self):
        ds = Dataset(features=np.array([[1.0], [3.0]]),
                     labels=np.array([0, 1]), feature_names=["a"], n_class=2)
        sc = fit_standardizer(ds, [0, 1])
        assert sc.stddevs[0] == pytest.approx(1.0)  # 1/n denominator, not 1/(n-1)

    def test_constant_column_maps_to_zero(self):
        X = np.array([[2.0, 1.0], [2.0, 5.0], [2.0, 9.0]])
        ds = Dataset(features=X, labels=np.array([0, 1, 0]),
                     feature_names=["a", "b"], n_class=2)
        sc = fit_standardizer(ds, [0, 1, 2])
        Z = apply_standardizer(sc, X)
        assert np.all(Z[:, 0] == 0.0)
        assert sc.constant[0] and not sc.constant[1]
        # a column constant in training but varying at apply time still maps to 0
        Xnew = np.array([[99.0, 5.0]])
        assert apply_standardizer(sc, Xnew)[0, 0] == 0.0

    def test_empty_rows_rejected(self):
        ds = make_dataset([0, 1])
        with pytest.raises(ValueError):
            fit_standardizer(ds, [])

    def test_dimension_mismatch_rejected(self):
        ds = make_dataset([0, 1])
        sc = fit_standardizer(ds, [0, 1])
        with pytest.raises(ValueError):
            apply_standardizer(sc, np.ones((3, 5)))


class TestOneHot:
    def test_values(self):
        Y = one_hot(np.array([0, 2, 1]), 3)
        assert np.array_equal(Y, np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float))

    def test_row_sums_and_argmax(self):
        y = np.random.default_rng(3).integers(0, 5, size=40)
        Y = one_hot(y, 5)
        assert np.all(Y.sum(axis=1) == 1.0)
        assert np.array_equal(np.argmax(Y, axis=1), y)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            one_hot(np.array([0, 3]), 3)


class TestStratifiedKFold:
    def test_partition(self):
        ds = make_dataset(np.repeat([0, 1, 2], [30, 20, 10]))
        folds = stratified_kfold(ds, k=5, seed=11)
        assert len(folds) == 5
        all_test = np.concatenate([f.test_rows for f in folds])
        assert sorted(all_test) == list(range(60))
        for f in folds:
            assert set(f.train_rows).isdisjoint(set(f.test_rows))
            assert len(f.train_rows) + len(f.test_rows) == 60

    def test_stratification_balance(self):
        ds = make_dataset(np.repeat([0, 1], [50, 50]))
        for f in stratified_kfold(ds, k=5, seed=0):
            counts = np.bincount(ds.labels[f.test_rows], minlength=2)
            assert list(counts) == [10, 10]

    def test_class_counts_within_one(self):
        ds = make_dataset(np.repeat([0, 1, 2], [23, 17, 11]))
        for f in stratified_kfold(ds, k=4, seed=5):
            for c, n in enumerate([23, 17, 11]):
                got = int(np.sum(ds.labels[f.test_rows] == c))
                assert abs(got - n / 4) <= 1

    def test_seed_reproducibility(self):
        ds = make_dataset(np.repeat([0, 1], 25))
        a = stratified_kfold(ds, k=3, seed=9)
        b = stratified_kfold(ds, k=3, seed=9)
        c = stratified_kfold(ds, k=3, seed=10)
        for fa, fb in zip(a, b):
            assert np.array_equal(fa.test_rows, fb.test_rows)
        assert any(not np.array_equal(fa.test_rows, fc.test_rows)
                   for fa, fc in zip(a, c))

    def test_small_class_warns(self):
        ds = make_dataset(np.array([0] * 20 + [1] * 2))
        with pytest.warns(UserWarning):
            stratified_kfold(ds, k=5, seed=1)

    def test_rejects_bad_k(self):
        ds = make_dataset(np.array([0, 1, 0, 1]))
        with pytest.raises(ValueError):
            stratified_kfold(ds, k=1, seed=0)
        with pytest.raises(ValueError):
            stratified_kfold(ds, k=5, seed=0)
