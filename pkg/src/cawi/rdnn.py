"""Randomized network architectures (RVFL, ELM, dRVFL, BLS) with
closed-form ridge training of the output layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .copula import CopulaModel, fit_copula, independence_model
from .dataset import ScalerParams
from .dependence import pseudo_observations, tau_matrix
from .numerics import RngStream
from .weights import WeightInit, init_from_dict, init_to_dict, sample_weight_init

__all__ = [
    "ACTIVATIONS",
    "ArchSpec",
    "TrainedModel",
    "activate",
    "feature_width",
    "sample_arch_inits",
    "build_features",
    "ridge_solve",
    "train",
    "predict",
    "trained_to_dict",
    "trained_from_dict",
]

_SELU_ALPHA = 1.6732632423
_SELU_LAMBDA = 1.0507009873


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500)))


ACTIVATIONS = {
    "sigmoid": _sigmoid,
    "sine": np.sin,
    "tribas": lambda x: np.maximum(0.0, 1.0 - np.abs(x)),
    "radbas": lambda x: np.exp(-np.square(x)),
    "tansig": lambda x: np.tanh(x),
    "relu": lambda x: np.maximum(0.0, x),
    "selu": lambda x: _SELU_LAMBDA * np.where(
        x > 0.0, x, _SELU_ALPHA * np.expm1(np.clip(x, -500, 0))),
}


def activate(kind: str, x):
    try:
        fn = ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(f"unknown activation {kind!r}") from None
    return fn(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ArchSpec:
    kind: str                          # rvfl | elm | drvfl | bls
    activation: str = "sigmoid"
    h: int = 103                       # rvfl / elm hidden width
    layer_widths: tuple = (103, 103, 103)   # drvfl
    q: int = 10                        # bls: feature windows
    p: int = 10                        # bls: nodes per feature window
    s: int = 1                         # bls: enhancement windows
    r: int = 100                       # bls: nodes per enhancement window
    enhancement_activation: str = "tansig"
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rvfl", "elm", "drvfl", "bls"):
            raise ValueError(f"unknown architecture {self.kind!r}")
        if self.lam < 0.0:
            raise ValueError("lambda must be nonnegative")
        widths = [self.h, self.q, self.p, self.s, self.r, *self.layer_widths]
        if any(w < 1 for w in widths):
            raise ValueError("all widths must be at least 1")

    def with_nodes(self, n: int) -> "ArchSpec":
        """Copy of this spec with the node-grid value applied (hidden width
        for rvfl/elm, per-layer width for drvfl; bls widths are fixed)."""
        from dataclasses import replace
        if self.kind in ("rvfl", "elm"):
            return replace(self, h=n)
        if self.kind == "drvfl":
            return replace(self, layer_widths=tuple(n for _ in self.layer_widths))
        return self


@dataclass(frozen=True)
class TrainedModel:
    arch: ArchSpec
    inits: list
    theta: np.ndarray              # a x n_class
    scaler: ScalerParams | None
    a: int


def feature_width(arch: ArchSpec, d: int) -> int:
    if arch.kind == "rvfl":
        return d + arch.h
    if arch.kind == "elm":
        return arch.h
    if arch.kind == "drvfl":
        return d + sum(arch.layer_widths)
    return arch.p * arch.q + arch.r * arch.s  # bls


def sample_arch_inits(arch: ArchSpec, d: int, model: CopulaModel, law: str,
                      rng: RngStream, X: np.ndarray | None = None,
                      cawi_all_layers: bool = False, m_cap: int = 2000) -> list[WeightInit]:
    """Sample every frozen layer/window of an architecture.

    The first random layer (and each BLS feature window, which reads X
    directly) uses the fitted copula; deeper layers and enhancement
    windows use iid weights. With ``cawi_all_layers`` a fresh copula of
    the same family is fitted to each intermediate representation, which
    requires X.
    """
    inits: list[WeightInit] = []

    def deep_model(H: np.ndarray, width: int, tag) -> CopulaModel:
        if cawi_all_layers and model.family != "independence":
            if X is None:
                raise ValueError("cawi_all_layers requires the training features")
            U = pseudo_observations(H)
            tm = tau_matrix(U, m_cap=m_cap, rng=rng.substream("tau", tag))
            return fit_copula(model.family, U, tm)
        return independence_model(width)

    if arch.kind in ("rvfl", "elm"):
        inits.append(sample_weight_init(model, d, arch.h, law, rng.substream("layer", 0)))
    elif arch.kind == "drvfl":
        inits.append(sample_weight_init(model, d, arch.layer_widths[0], law,
                                        rng.substream("layer", 0)))
        H = None
        if cawi_all_layers and X is not None:
            H = activate(arch.activation, X @ inits[0].W + inits[0].b)
        prev = arch.layer_widths[0]
        for l, width in enumerate(arch.layer_widths[1:], start=1):
            layer_model = deep_model(H, prev, l) if H is not None else independence_model(prev)
            inits.append(sample_weight_init(layer_model, prev, width, law,
                                            rng.substream("layer", l)))
            if H is not None:
                H = activate(arch.activation, H @ inits[-1].W + inits[-1].b)
            prev = width
    else:  # bls
        for i in range(arch.q):
            inits.append(sample_weight_init(model, d, arch.p, law,
                                            rng.substream("feature_window", i)))
        pq = arch.p * arch.q
        Z = None
        if cawi_all_layers and X is not None:
            Z = np.hstack([activate(arch.activation, X @ w.W + w.b) for w in inits])
        for j in range(arch.s):
            enh_model = deep_model(Z, pq, j) if Z is not None else independence_model(pq)
            inits.append(sample_weight_init(enh_model, pq, arch.r, law,
                                            rng.substream("enhancement_window", j)))
    return inits


def build_features(arch: ArchSpec, X: np.ndarray, inits: list[WeightInit]) -> np.ndarray:
    """Assemble the augmented feature matrix A for the given architecture."""
    X = np.asarray(X, dtype=float)
    phi = ACTIVATIONS[arch.activation]

    if arch.kind in ("rvfl", "elm"):
        (init,) = inits
        if init.W.shape != (X.shape[1], arch.h):
            raise ValueError(f"init shape {init.W.shape} does not match "
                             f"(d={X.shape[1]}, h={arch.h})")
        H = phi(X @ init.W + init.b)
        return np.hstack([X, H]) if arch.kind == "rvfl" else H

    if arch.kind == "drvfl":
        if len(inits) != len(arch.layer_widths):
            raise ValueError("drvfl needs one init per layer")
        blocks = [X]
        H = X
        for init, width in zip(inits, arch.layer_widths):
            if init.W.shape != (H.shape[1], width):
                raise ValueError(f"layer init shape {init.W.shape} does not match "
                                 f"({H.shape[1]}, {width})")
            H = phi(H @ init.W + init.b)
            blocks.append(H)
        return np.hstack(blocks)

    # bls
    if len(inits) != arch.q + arch.s:
        raise ValueError("bls needs q feature-window inits plus s enhancement inits")
    psi = ACTIVATIONS[arch.enhancement_activation]
    Z = np.hstack([phi(X @ w.W + w.b) for w in inits[:arch.q]])
    E = np.hstack([psi(Z @ w.W + w.b) for w in inits[arch.q:]])
    return np.hstack([Z, E])


def ridge_solve(A: np.ndarray, Y: np.ndarray, lam: float) -> np.ndarray:
    """Ridge-regularized least squares via an SPD factorization.

    Primal form when a <= m, dual otherwise; both exact for lam > 0.
    A singular factorization at lam = 0 raises, signalling rank deficiency.
    """
    A = np.asarray(A, dtype=float)
    Y = np.asarray(Y, dtype=float)
    m, a = A.shape
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    try:
        if a <= m:
            G = A.T @ A + lam * np.eye(a)
            c, low = linalg.cho_factor(G, check_finite=False)
            return linalg.cho_solve((c, low), A.T @ Y, check_finite=False)
        K = A @ A.T + lam * np.eye(m)
        c, low = linalg.cho_factor(K, check_finite=False)
        return A.T @ linalg.cho_solve((c, low), Y, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"ridge factorization failed at lambda={lam}: {exc}") from exc


def train(arch: ArchSpec, X: np.ndarray, Y_onehot: np.ndarray,
          inits: list[WeightInit], scaler: ScalerParams | None = None) -> TrainedModel:
    """Closed-form training; X is expected to be standardized already."""
    A = build_features(arch, X, inits)
    theta = ridge_solve(A, Y_onehot, arch.lam)
    return TrainedModel(arch=arch, inits=list(inits), theta=theta,
                        scaler=scaler, a=A.shape[1])


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Argmax over score columns; ties break to the lowest class index."""
    A = build_features(model.arch, X, model.inits)
    scores = A @ model.theta
    return np.argmax(scores, axis=1)


def trained_to_dict(model: TrainedModel) -> dict:
    arch = model.arch
    doc = {
        "arch": {
            "kind": arch.kind, "activation": arch.activation, "h": arch.h,
            "layer_widths": list(arch.layer_widths), "q": arch.q, "p": arch.p,
            "s": arch.s, "r": arch.r,
            "enhancement_activation": arch.enhancement_activation, "lam": arch.lam,
        },
        "a": model.a,
        "n_class": model.theta.shape[1],
        "theta": [float(v) for v in model.theta.ravel()],
        "inits": [init_to_dict(w) for w in model.inits],
    }
    if model.scaler is not None:
        doc["scaler"] = {
            "means": [float(v) for v in model.scaler.means],
            "stddevs": [float(v) for v in model.scaler.stddevs],
            "constant": [bool(v) for v in model.scaler.constant],
        }
    return doc


def trained_from_dict(doc: dict) -> TrainedModel:
    a_doc = doc["arch"]
    arch = ArchSpec(kind=a_doc["kind"], activation=a_doc["activation"], h=a_doc["h"],
                    layer_widths=tuple(a_doc["layer_widths"]), q=a_doc["q"], p=a_doc["p"],
                    s=a_doc["s"], r=a_doc["r"],
                    enhancement_activation=a_doc["enhancement_activation"],
                    lam=a_doc["lam"])
    theta = np.asarray(doc["theta"], dtype=float).reshape(doc["a"], doc["n_class"])
    scaler = None
    if "scaler" in doc:
        s = doc["scaler"]
        scaler = ScalerParams(means=np.asarray(s["means"]),
                              stddevs=np.asarray(s["stddevs"]),
                              constant=np.asarray(s["constant"], dtype=bool))
    inits = [init_from_dict(w) for w in doc["inits"]]
    return TrainedModel(arch=arch, inits=inits, theta=theta, scaler=scaler, a=doc["a"])
