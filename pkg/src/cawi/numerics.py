"""Special functions and random-variate primitives.

Normal and Student-t CDF/quantile pairs, the order-1 Debye function, and
the frailty variates used by the Archimedean copula samplers. Also the
seeded, stream-splittable random generator every stochastic component of
the pipeline draws from.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
from scipy import integrate, special

__all__ = [
    "RngStream",
    "mix64",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "debye1",
    "sample_frailty",
]

_U64 = (1 << 64) - 1


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & _U64
    if isinstance(tag, str):
        digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"stream tag must be int or str, got {type(tag).__name__}")


def mix64(*parts) -> int:
    """Mix integer/string tags into one 64-bit value (splitmix64 finalizer).

    Used to derive substream seeds so that parallel execution order can
    never change which sequence a worker sees.
    """
    acc = 0x9E3779B97F4A7C15
    for part in parts:
        acc = (acc + _tag_to_int(part) + 0x9E3779B97F4A7C15) & _U64
        z = acc
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
        acc = z ^ (z >> 31)
    return acc


class RngStream:
    """Counter-based generator with explicit stream derivation.

    Built on Philox so that substreams derived from one master seed via
    ``substream`` are statistically independent and byte-reproducible.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _U64
        self.stream_id = int(stream_id) & _U64
        key = (self.seed << 64) | self.stream_id
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, *tags) -> "RngStream":
        """Derive an independent stream keyed by (seed, tags)."""
        return RngStream(self.seed, mix64(self.stream_id, *tags))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self, size=None):
        """Uniform variates strictly inside (0, 1)."""
        k = self._gen.integers(0, 1 << 53, size=size)
        return (k + 0.5) / float(1 << 53)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size=size)

    def chi_square(self, nu: float, size=None):
        return self._gen.chisquare(nu, size=size)

    def exponential(self, size=None):
        return self._gen.standard_exponential(size=size)

    def gamma(self, shape: float, size=None):
        return self._gen.gamma(shape, 1.0, size=size)

    def log_series(self, p: float, size=None):
        return self._gen.logseries(p, size=size)

    def permutation(self, n: int):
        return self._gen.permutation(n)


# ---------------------------------------------------------------------------
# Normal distribution

def std_normal_cdf(x):
    """Standard normal CDF, accurate over the full double range."""
    return special.ndtr(x)


# Acklam's rational approximation coefficients for the central and tail
# regions of the inverse normal CDF; one Newton step against ndtr below
# pushes the error to near machine precision.
_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02,
             -2.759285104469687e+02, 1.383577518672690e+02,
             -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02,
             -1.556989798598866e+02, 6.680131188771972e+01,
             -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01,
             -2.400758277161838e+00, -2.549732539343734e+00,
             4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01,
             2.445134137142996e+00, 3.754408661907416e+00)


def _acklam(p):
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p = np.asarray(p, dtype=float)
    x = np.empty_like(p)
    p_low, p_high = 0.02425, 1.0 - 0.02425

    lo = p < p_low
    hi = p > p_high
    mid = ~(lo | hi)

    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
        den = (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        x[mid] = q * num / den
    if np.any(lo):
        q = np.sqrt(-2.0 * np.log(p[lo]))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
        x[lo] = num / den
    if np.any(hi):
        q = np.sqrt(-2.0 * np.log(1.0 - p[hi]))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
        x[hi] = -num / den
    return x


def _lower_tail_quantile(p):
    """Acklam plus one Newton polish, for p <= 0.5 where Phi(x) - p is
    free of cancellation."""
    x = _acklam(p)
    pdf = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return x - (special.ndtr(x) - p) / pdf


def std_normal_quantile(p):
    """Inverse standard normal CDF.

    Evaluated in the lower tail and reflected for p > 0.5 (1 - p is exact
    there), which makes q(1 - p) = -q(p) hold bitwise and keeps the
    absolute error below 1e-9 on [1e-12, 1 - 1e-12].
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise ValueError("quantile argument must lie strictly in (0, 1)")
    upper = p_arr > 0.5
    x = np.where(upper,
                 -_lower_tail_quantile(np.where(upper, 1.0 - p_arr, 0.25)),
                 _lower_tail_quantile(np.where(upper, 0.25, p_arr)))
    if np.isscalar(p) or p_arr.ndim == 0:
        return float(x)
    return x


# ---------------------------------------------------------------------------
# Student t distribution

def _check_nu(nu: float):
    if not np.isfinite(nu) or nu <= 2.0:
        raise ValueError(f"degrees of freedom must exceed 2, got {nu}")


def student_t_cdf(x, nu: float):
    """Student t CDF via the regularized incomplete beta function."""
    _check_nu(nu)
    return special.stdtr(nu, x)


def student_t_quantile(p, nu: float):
    """Student t quantile; inverse of :func:`student_t_cdf` to 1e-8."""
    _check_nu(nu)
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise ValueError("quantile argument must lie strictly in (0, 1)")
    # lower-tail evaluation with reflection, for symmetric accuracy
    upper = p_arr > 0.5
    q = np.where(upper,
                 -special.stdtrit(nu, np.where(upper, 1.0 - p_arr, 0.25)),
                 special.stdtrit(nu, np.where(upper, 0.25, p_arr)))
    if np.isscalar(p) or p_arr.ndim == 0:
        return float(q)
    return q


# ---------------------------------------------------------------------------
# Debye function of order 1

def debye1(theta: float) -> float:
    """D1(theta) = (1/theta) * integral_0^theta t/(e^t - 1) dt."""
    if not np.isfinite(theta) or theta <= 0.0:
        raise ValueError(f"debye1 requires a positive finite argument, got {theta}")
    if theta <= 1e-8:
        # series: 1 - theta/4 + theta^2/36 - ...
        return 1.0 - theta / 4.0 + theta * theta / 36.0

    def integrand(t):
        return t / np.expm1(t) if t > 1e-12 else 1.0 - t / 2.0

    val, _ = integrate.quad(integrand, 0.0, theta, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val / theta


# ---------------------------------------------------------------------------
# Frailty variates (Marshall-Olkin style Archimedean samplers)

def _positive_stable(alpha: float, rng: RngStream, size=None):
    """Positive alpha-stable variates with Laplace transform exp(-s^alpha).

    Chambers-Mallows-Stuck construction from a uniform angle and an
    exponential; alpha = 1 degenerates to the unit constant.
    """
    if alpha >= 1.0:
        return np.ones(size) if size is not None else 1.0
    xi = rng.uniform(size=size) * math.pi
    w = rng.exponential(size=size)
    sin_xi = np.sin(xi)
    factor = np.sin(alpha * xi) / sin_xi ** (1.0 / alpha)
    tail = (np.sin((1.0 - alpha) * xi) / w) ** ((1.0 - alpha) / alpha)
    return factor * tail


def sample_frailty(family: str, theta: float, rng: RngStream, size=None):
    """Shared frailty variate V for the exchangeable Archimedean samplers.

    clayton -> Gamma(1/theta, 1); gumbel -> positive stable(1/theta);
    frank -> logarithmic-series integer with parameter 1 - exp(-theta).
    """
    if family == "clayton":
        if theta <= 0.0:
            raise ValueError("clayton frailty requires theta > 0")
        return rng.gamma(1.0 / theta, size=size)
    if family == "gumbel":
        if theta < 1.0:
            raise ValueError("gumbel frailty requires theta >= 1")
        return _positive_stable(1.0 / theta, rng, size=size)
    if family == "frank":
        if theta <= 0.0:
            raise ValueError("frank frailty requires theta > 0")
        p = -np.expm1(-theta)
        return rng.log_series(p, size=size).astype(float)
    raise ValueError(f"unknown frailty family: {family!r}")
