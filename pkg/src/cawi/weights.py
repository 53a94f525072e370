"""Frozen weight initialization: copula draws mapped through a fixed
marginal quantile, plus the conventional iid uniform baseline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .copula import CopulaModel, independence_model, sample_copula
from .numerics import RngStream, std_normal_quantile

__all__ = [
    "MARGINALS",
    "WeightInit",
    "marginal_quantile",
    "sample_weight_init",
    "iid_baseline",
    "init_to_dict",
    "init_from_dict",
    "save_init",
    "load_init",
]

MARGINALS = ("uniform_pm1", "std_normal")


def marginal_quantile(law: str, u):
    """Quantile of the weight marginal G at u in (0,1)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("marginal_quantile requires u strictly inside (0,1)")
    if law == "uniform_pm1":
        out = 2.0 * u_arr - 1.0
    elif law == "std_normal":
        out = std_normal_quantile(u_arr)
    else:
        raise ValueError(f"unknown marginal law {law!r}")
    if np.isscalar(u) or u_arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class WeightInit:
    W: np.ndarray                  # d x h
    b: np.ndarray                  # length h
    provenance: dict = field(default_factory=dict)


def sample_weight_init(model: CopulaModel, d: int, h: int, law: str,
                       rng: RngStream) -> WeightInit:
    """Sample a frozen d x h weight matrix whose columns carry the fitted
    copula's dependence, with marginals G; biases are iid Uniform(-1,1)
    from a separate substream."""
    if model.d != d:
        raise ValueError(f"copula dimension {model.d} does not match d={d}")
    if h < 1:
        raise ValueError("h must be positive")
    U = sample_copula(model, h, rng.substream("weights"))       # h x d
    W = marginal_quantile(law, U).T                             # d x h
    b = 2.0 * rng.substream("bias").uniform(size=h) - 1.0
    prov = {"family": model.family, "marginal": law,
            "seed": rng.seed, "stream_id": rng.stream_id}
    return WeightInit(W=W, b=b, provenance=prov)


def iid_baseline(d: int, h: int, rng: RngStream) -> WeightInit:
    """Conventional initialization: W iid Uniform(-1,1)."""
    return sample_weight_init(independence_model(d), d, h, "uniform_pm1", rng)


def init_to_dict(init: WeightInit) -> dict:
    return {
        "d": init.W.shape[0],
        "h": init.W.shape[1],
        "W": [float(v) for v in init.W.ravel()],
        "b": [float(v) for v in init.b],
        "provenance": dict(init.provenance),
    }


def init_from_dict(doc: dict) -> WeightInit:
    d, h = int(doc["d"]), int(doc["h"])
    W = np.asarray(doc["W"], dtype=float).reshape(d, h)
    b = np.asarray(doc["b"], dtype=float)
    return WeightInit(W=W, b=b, provenance=dict(doc.get("provenance", {})))


def save_init(init: WeightInit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(init_to_dict(init), fh, sort_keys=True)
        fh.write("\n")


def load_init(path) -> WeightInit:
    with open(path, "r", encoding="utf-8") as fh:
        return init_from_dict(json.load(fh))
