"""Fitting and sampling for the five copula families plus the product copula.

Elliptical families (gaussian, student_t) carry a correlation matrix
estimated from pairwise Kendall tau through R_ij = sin(pi*tau_ij/2) and a
nearest-correlation repair; the t family adds a profiled degrees-of-freedom
parameter. Archimedean families (clayton, frank, gumbel) carry a single
exchangeable theta matched to the mean pairwise tau, and are sampled
through shared frailty variates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import interpolate, special

from .dependence import TauMatrix, nearest_correlation
from .numerics import RngStream, debye1, sample_frailty

__all__ = [
    "FAMILIES",
    "CopulaModel",
    "independence_model",
    "tau_of_theta",
    "fit_copula",
    "sample_copula",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

FAMILIES = ("gaussian", "student_t", "clayton", "frank", "gumbel", "independence")
ARCHIMEDEAN = ("clayton", "frank", "gumbel")

THETA_MIN = 1e-4
THETA_MAX = 50.0
NU_GRID = (3.0, 5.0, 8.0, 12.0, 20.0, 30.0)
U_CLAMP = 1e-12


@dataclass
class CopulaModel:
    family: str
    d: int
    R: np.ndarray | None = None        # elliptical
    theta: float | None = None         # Archimedean
    nu: float | None = None            # student_t
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown copula family: {self.family!r}")


def independence_model(d: int) -> CopulaModel:
    return CopulaModel(family="independence", d=d)


# ---------------------------------------------------------------------------
# tau <-> theta maps

def tau_of_theta(family: str, theta: float) -> float:
    """Kendall's tau implied by the Archimedean parameter theta."""
    if family == "clayton":
        if theta <= 0.0:
            raise ValueError("clayton requires theta > 0")
        return theta / (theta + 2.0)
    if family == "gumbel":
        if theta < 1.0:
            raise ValueError("gumbel requires theta >= 1")
        return 1.0 - 1.0 / theta
    if family == "frank":
        if theta <= 0.0:
            raise ValueError("frank requires theta > 0 here")
        return 1.0 - 4.0 / theta + (4.0 / theta) * debye1(theta)
    raise ValueError(f"tau_of_theta undefined for family {family!r}")


def _invert_frank_tau(bar_tau: float) -> tuple[float, bool]:
    """Solve tau(theta) = bar_tau by monotone bisection on [THETA_MIN, THETA_MAX]."""
    lo, hi = THETA_MIN, THETA_MAX
    if bar_tau <= tau_of_theta("frank", lo):
        return lo, True
    if bar_tau >= tau_of_theta("frank", hi):
        return hi, True
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = tau_of_theta("frank", mid) - bar_tau
        if abs(f) <= 1e-8:
            return mid, False
        if f < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False


# ---------------------------------------------------------------------------
# t-copula pseudo-likelihood profile

@lru_cache(maxsize=32)
def _t_quantile_interp(nu: float):
    """Monotone interpolant of the t quantile, parameterized by the normal
    quantile of u. Cheap to build and accurate far beyond what the
    one-dimensional nu search needs."""
    # pseudo-observations live in [1/(m+1), m/(m+1)], so |z| <= 6 covers
    # every m the pipeline can produce
    z_grid = np.linspace(-6.0, 6.0, 257)
    x_grid = special.stdtrit(nu, special.ndtr(z_grid))
    return interpolate.PchipInterpolator(z_grid, x_grid)


def _t_copula_loglik(U: np.ndarray, R: np.ndarray, nu: float) -> float:
    m, d = U.shape
    z = special.ndtri(np.clip(U, U_CLAMP, 1.0 - U_CLAMP))
    x = _t_quantile_interp(nu)(np.clip(z, -6.0, 6.0))

    L = np.linalg.cholesky(R)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    w = np.linalg.solve(L, x.T)            # d x m
    quad = np.sum(w * w, axis=0)           # x' R^{-1} x per row

    lg = special.gammaln
    joint = (lg((nu + d) / 2.0) - lg(nu / 2.0) - 0.5 * d * math.log(nu * math.pi)
             - 0.5 * logdet - 0.5 * (nu + d) * np.log1p(quad / nu))
    marg_const = lg((nu + 1.0) / 2.0) - lg(nu / 2.0) - 0.5 * math.log(nu * math.pi)
    marg = d * marg_const - 0.5 * (nu + 1.0) * np.sum(np.log1p(x * x / nu), axis=1)
    return float(np.sum(joint - marg))


# ---------------------------------------------------------------------------
# Fitting

def fit_copula(family: str, U: np.ndarray, tau: TauMatrix,
               nu_grid=NU_GRID, floor: float = 1e-8) -> CopulaModel:
    """Estimate the copula parameters from pseudo-observations and their
    pairwise Kendall tau matrix (both computed on the same training split)."""
    U = np.asarray(U, dtype=float)
    d = U.shape[1]
    if not np.all(np.isfinite(tau.tau)):
        raise ValueError("tau matrix contains non-finite entries")

    diag = {"bar_tau": tau.bar_tau, "clamped": False, "subsampled": tau.subsampled}

    if family == "independence":
        return CopulaModel(family=family, d=d, diagnostics=diag)

    if family in ("gaussian", "student_t"):
        R_raw = np.sin(0.5 * math.pi * tau.tau)
        corr = nearest_correlation(R_raw, floor=floor)
        if family == "gaussian":
            return CopulaModel(family=family, d=d, R=corr.R, diagnostics=diag)
        profile = [(float(nu), _t_copula_loglik(U, corr.R, float(nu))) for nu in nu_grid]
        best_nu = max(profile, key=lambda item: item[1])[0]
        diag["nu_loglik_profile"] = profile
        return CopulaModel(family=family, d=d, R=corr.R, nu=best_nu, diagnostics=diag)

    if family in ARCHIMEDEAN:
        bt = tau.bar_tau
        if family == "clayton":
            if bt <= 0.0 or bt >= 1.0:
                theta = THETA_MIN if bt <= 0.0 else THETA_MAX
                clamped = True
            else:
                theta = 2.0 * bt / (1.0 - bt)
                clamped = not (THETA_MIN <= theta <= THETA_MAX)
                theta = min(max(theta, THETA_MIN), THETA_MAX)
        elif family == "gumbel":
            if bt <= 0.0 or bt >= 1.0:
                # tau of exactly 0 maps to theta = 1 exactly; only genuine
                # out-of-range values count as clamped
                theta = 1.0 if bt <= 0.0 else THETA_MAX
                clamped = bt < 0.0 or bt >= 1.0
            else:
                theta = 1.0 / (1.0 - bt)
                clamped = not (1.0 <= theta <= THETA_MAX)
                theta = min(max(theta, 1.0), THETA_MAX)
        else:  # frank
            theta, clamped = _invert_frank_tau(bt)
        diag["clamped"] = bool(clamped)
        return CopulaModel(family=family, d=d, theta=float(theta), diagnostics=diag)

    raise ValueError(f"unknown copula family: {family!r}")


# ---------------------------------------------------------------------------
# Sampling

def _cholesky_with_ridge(R: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        return np.linalg.cholesky(R + 1e-10 * np.eye(R.shape[0]))


def sample_copula(model: CopulaModel, N: int, rng: RngStream) -> np.ndarray:
    """Draw N rows from the fitted copula; entries clamped inside (0,1)."""
    if N < 1:
        raise ValueError("N must be positive")
    d = model.d

    if model.family == "independence":
        u = rng.uniform(size=(N, d))
    elif model.family in ("gaussian", "student_t"):
        L = _cholesky_with_ridge(model.R)
        g = rng.standard_normal(size=(N, d))
        z = g @ L.T
        if model.family == "gaussian":
            u = special.ndtr(z)
        else:
            s = rng.chi_square(model.nu, size=N)
            x = z / np.sqrt(s / model.nu)[:, None]
            u = special.stdtr(model.nu, x)
    elif model.family in ARCHIMEDEAN:
        theta = model.theta
        V = sample_frailty(model.family, theta, rng, size=N) \
            if not (model.family == "gumbel" and theta == 1.0) else np.ones(N)
        E = rng.exponential(size=(N, d))
        ratio = E / np.asarray(V, dtype=float)[:, None]
        if model.family == "clayton":
            u = (1.0 + ratio) ** (-1.0 / theta)
        elif model.family == "gumbel":
            u = np.exp(-(ratio ** (1.0 / theta)))
        else:  # frank
            p = -np.expm1(-theta)
            u = -np.log1p(-p * np.exp(-ratio)) / theta
    else:
        raise ValueError(f"unknown copula family: {model.family!r}")

    return np.clip(u, U_CLAMP, 1.0 - U_CLAMP)


# ---------------------------------------------------------------------------
# Serialization

def model_to_dict(model: CopulaModel) -> dict:
    doc = {"family": model.family, "d": model.d, "diagnostics": dict(model.diagnostics)}
    if model.theta is not None:
        doc["theta"] = model.theta
    if model.nu is not None:
        doc["nu"] = model.nu
    if model.R is not None:
        doc["R"] = [float(v) for v in model.R.ravel()]
    return doc


def model_from_dict(doc: dict) -> CopulaModel:
    d = int(doc["d"])
    R = None
    if "R" in doc:
        R = np.asarray(doc["R"], dtype=float).reshape(d, d)
    return CopulaModel(family=doc["family"], d=d, R=R,
                       theta=doc.get("theta"), nu=doc.get("nu"),
                       diagnostics=dict(doc.get("diagnostics", {})))


def save_model(model: CopulaModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> CopulaModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
