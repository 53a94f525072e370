import numpy as np
import pytest

from cawi.copula import independence_model
from cawi.dataset import one_hot
from cawi.numerics import RngStream
from cawi.rdnn import (ACTIVATIONS, ArchSpec, activate, build_features,
                       feature_width, predict, ridge_solve, sample_arch_inits,
                       train, trained_from_dict, trained_to_dict)


def make_blobs(seed=0, m_per=60, d=4, n_class=3, sep=4.0):
    rng = RngStream(seed)
    centers = rng.standard_normal(size=(n_class, d)) * sep
    X = np.vstack([centers[c] + rng.substream("pts", c).standard_normal(size=(m_per, d))
                   for c in range(n_class)])
    y = np.repeat(np.arange(n_class), m_per)
    return X, y


class TestActivations:
    def test_reference_values(self):
        x = np.array([0.0])
        assert activate("sigmoid", x)[0] == 0.5
        assert activate("sine", np.array([np.pi / 2]))[0] == pytest.approx(1.0)
        assert activate("tansig", x)[0] == 0.0
        assert activate("radbas", x)[0] == 1.0
        assert activate("tribas", x)[0] == 1.0
        assert activate("relu", np.array([-2.0, 3.0])).tolist() == [0.0, 3.0]

    def test_tribas_shape(self):
        x = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
        assert np.allclose(activate("tribas", x), [0.0, 0.0, 0.5, 0.5, 0.0, 0.0])

    def test_radbas_gaussian(self):
        assert activate("radbas", np.array([1.0]))[0] == pytest.approx(np.exp(-1.0))

    def test_selu_constants(self):
        # positive branch is linear with slope ~1.0507
        assert activate("selu", np.array([2.0]))[0] == pytest.approx(2.0 * 1.0507009873)
        got = activate("selu", np.array([-1.0]))[0]
        assert got == pytest.approx(1.0507009873 * 1.6732632423 * (np.exp(-1.0) - 1.0))

    def test_sigmoid_extreme_inputs_finite(self):
        out = activate("sigmoid", np.array([-1e6, 1e6]))
        assert np.all(np.isfinite(out))
        assert out[0] == pytest.approx(0.0) and out[1] == pytest.approx(1.0)

    def test_registry_complete(self):
        assert set(ACTIVATIONS) == {"sigmoid", "sine", "tribas", "radbas",
                                    "tansig", "relu", "selu"}

    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            activate("swish", np.array([0.0]))


class TestArchSpec:
    def test_feature_widths(self):
        d = 7
        assert feature_width(ArchSpec(kind="rvfl", h=50), d) == 57
        assert feature_width(ArchSpec(kind="elm", h=50), d) == 50
        assert feature_width(ArchSpec(kind="drvfl", layer_widths=(10, 20, 30)), d) == 67
        assert feature_width(ArchSpec(kind="bls", q=3, p=4, s=2, r=5), d) == 22

    def test_with_nodes(self):
        assert ArchSpec(kind="rvfl").with_nodes(11).h == 11
        assert ArchSpec(kind="drvfl").with_nodes(9).layer_widths == (9, 9, 9)
        bls = ArchSpec(kind="bls")
        assert bls.with_nodes(999) == bls

    def test_validation(self):
        with pytest.raises(ValueError):
            ArchSpec(kind="cnn")
        with pytest.raises(ValueError):
            ArchSpec(kind="rvfl", lam=-1.0)
        with pytest.raises(ValueError):
            ArchSpec(kind="rvfl", h=0)


class TestBuildFeatures:
    def test_rvfl_contains_raw_features(self):
        X = RngStream(1).standard_normal(size=(20, 5))
        arch = ArchSpec(kind="rvfl", h=8)
        inits = sample_arch_inits(arch, 5, independence_model(5), "uniform_pm1",
                                  RngStream(2))
        A = build_features(arch, X, inits)
        assert A.shape == (20, 13)
        assert np.array_equal(A[:, :5], X)

    def test_elm_excludes_raw_features(self):
        X = RngStream(3).standard_normal(size=(20, 5))
        arch = ArchSpec(kind="elm", h=8)
        inits = sample_arch_inits(arch, 5, independence_model(5), "uniform_pm1",
                                  RngStream(4))
        assert build_features(arch, X, inits).shape == (20, 8)

    def test_drvfl_stacks_all_layers(self):
        X = RngStream(5).standard_normal(size=(15, 4))
        arch = ArchSpec(kind="drvfl", layer_widths=(6, 7, 8))
        inits = sample_arch_inits(arch, 4, independence_model(4), "uniform_pm1",
                                  RngStream(6))
        assert [w.W.shape for w in inits] == [(4, 6), (6, 7), (7, 8)]
        A = build_features(arch, X, inits)
        assert A.shape == (15, 4 + 6 + 7 + 8)
        assert np.array_equal(A[:, :4], X)

    def test_bls_window_layout(self):
        X = RngStream(7).standard_normal(size=(12, 3))
        arch = ArchSpec(kind="bls", q=4, p=5, s=2, r=6)
        inits = sample_arch_inits(arch, 3, independence_model(3), "uniform_pm1",
                                  RngStream(8))
        assert len(inits) == 6
        assert all(w.W.shape == (3, 5) for w in inits[:4])
        assert all(w.W.shape == (20, 6) for w in inits[4:])
        assert build_features(arch, X, inits).shape == (12, 32)

    def test_shape_mismatch_detected(self):
        X = RngStream(9).standard_normal(size=(10, 4))
        arch = ArchSpec(kind="rvfl", h=8)
        wrong = sample_arch_inits(ArchSpec(kind="rvfl", h=9), 4,
                                  independence_model(4), "uniform_pm1", RngStream(10))
        with pytest.raises(ValueError):
            build_features(arch, X, wrong)

    def test_frozen_inits_reused_exactly(self):
        # sampling once and reusing must give identical features both times
        X = RngStream(11).standard_normal(size=(10, 4))
        arch = ArchSpec(kind="rvfl", h=8)
        inits = sample_arch_inits(arch, 4, independence_model(4), "uniform_pm1",
                                  RngStream(12))
        assert np.array_equal(build_features(arch, X, inits),
                              build_features(arch, X, inits))


class TestRidgeSolve:
    def test_against_normal_equations_oracle(self):
        rng = RngStream(13)
        for trial in range(10):
            m = int(20 + 30 * rng.uniform())
            a = int(5 + 40 * rng.uniform())
            A = rng.substream("A", trial).standard_normal(size=(m, a))
            Y = rng.substream("Y", trial).standard_normal(size=(m, 3))
            lam = 10.0 ** (-3 + 6 * rng.uniform())
            oracle = np.linalg.solve(A.T @ A + lam * np.eye(a), A.T @ Y)
            assert np.allclose(ridge_solve(A, Y, lam), oracle, atol=1e-8)

    def test_primal_dual_agreement(self):
        rng = RngStream(14)
        A = rng.standard_normal(size=(30, 80))   # a > m forces the dual path
        Y = rng.substream("y").standard_normal(size=(30, 2))
        lam = 0.5
        dual = ridge_solve(A, Y, lam)
        primal = np.linalg.solve(A.T @ A + lam * np.eye(80), A.T @ Y)
        assert np.allclose(dual, primal, atol=1e-8)

    def test_lambda_shrinks_solution(self):
        rng = RngStream(15)
        A = rng.standard_normal(size=(50, 20))
        Y = rng.substream("y").standard_normal(size=(50, 2))
        norms = [np.linalg.norm(ridge_solve(A, Y, lam))
                 for lam in (1e-3, 1e-1, 1e1, 1e3)]
        assert all(n1 > n2 for n1, n2 in zip(norms, norms[1:]))

    def test_zero_lambda_on_full_rank(self):
        rng = RngStream(16)
        A = rng.standard_normal(size=(40, 10))
        theta_true = rng.substream("t").standard_normal(size=(10, 1))
        Y = A @ theta_true
        assert np.allclose(ridge_solve(A, Y, 0.0), theta_true, atol=1e-8)

    def test_rank_deficient_zero_lambda_raises(self):
        A = np.ones((10, 3))
        with pytest.raises(np.linalg.LinAlgError):
            ridge_solve(A, np.ones((10, 1)), 0.0)

    def test_negative_lambda_rejected(self):
        with pytest.raises(ValueError):
            ridge_solve(np.eye(3), np.eye(3), -1.0)


class TestTrainPredict:
    @pytest.mark.parametrize("kind", ["rvfl", "elm", "drvfl", "bls"])
    def test_separable_blobs(self, kind):
        X, y = make_blobs(seed=17)
        arch = ArchSpec(kind=kind, activation="sigmoid", h=40,
                        layer_widths=(20, 20), q=4, p=6, s=1, r=20, lam=1e-3)
        inits = sample_arch_inits(arch, X.shape[1], independence_model(X.shape[1]),
                                  "uniform_pm1", RngStream(18))
        model = train(arch, X, one_hot(y, 3), inits)
        acc = np.mean(predict(model, X) == y)
        assert acc >= 0.95, (kind, acc)

    def test_tie_breaks_to_lowest_class(self):
        arch = ArchSpec(kind="elm", h=2)
        inits = sample_arch_inits(arch, 2, independence_model(2), "uniform_pm1",
                                  RngStream(19))
        model = train(arch, np.zeros((4, 2)), one_hot(np.array([0, 1, 0, 1]), 2), inits)
        # zero input rows produce identical scores per class after symmetric
        # targets; verify argmax semantics directly on a forced tie
        scores = np.zeros((3, 4))
        assert np.argmax(scores, axis=1).tolist() == [0, 0, 0]
        assert predict(model, np.zeros((2, 2))).shape == (2,)

    def test_deterministic_end_to_end(self):
        X, y = make_blobs(seed=20)
        arch = ArchSpec(kind="rvfl", h=30, lam=1.0)
        def run():
            inits = sample_arch_inits(arch, X.shape[1],
                                      independence_model(X.shape[1]),
                                      "uniform_pm1", RngStream(21))
            return train(arch, X, one_hot(y, 3), inits).theta
        assert np.array_equal(run(), run())

    def test_serialization_roundtrip(self):
        X, y = make_blobs(seed=22, m_per=30)
        arch = ArchSpec(kind="rvfl", h=12, lam=0.1)
        inits = sample_arch_inits(arch, X.shape[1], independence_model(X.shape[1]),
                                  "uniform_pm1", RngStream(23))
        model = train(arch, X, one_hot(y, 3), inits)
        back = trained_from_dict(trained_to_dict(model))
        assert np.array_equal(back.theta, model.theta)
        assert np.array_equal(predict(back, X), predict(model, X))
