"""Scalar numerical primitives.

Standard normal CDF/quantile, survivor probabilities for the minimum of
equicorrelated normals (one-factor model, Gauss-Hermite quadrature), and
generic monotone-function inversion by bisection. Everything here is a pure
function of its inputs and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ToleranceConfig:
    """Accuracy knobs shared by the numerical primitives.

    abs_tol_cdf: absolute error bound for CDF evaluation.
    abs_tol_invert: bisection stopping width for inversion.
    quadrature_nodes: Gauss-Hermite node count for orthant integrals.
    """

    abs_tol_cdf: float = 1e-13
    abs_tol_invert: float = 1e-12
    quadrature_nodes: int = 64

    def __post_init__(self) -> None:
        if not (self.abs_tol_cdf > 0.0 and self.abs_tol_invert > 0.0):
            raise ValueError("tolerances must be strictly positive")
        if self.quadrature_nodes < 16:
            raise ValueError("quadrature_nodes must be at least 16")


DEFAULT_TOLERANCES = ToleranceConfig()


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the C library's erfc (error < 1e-13)."""
    if not math.isfinite(x):
        raise ValueError(f"std_normal_cdf requires finite input, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), computed without cancellation."""
    if not math.isfinite(x):
        raise ValueError(f"std_normal_sf requires finite input, got {x!r}")
    return 0.5 * math.erfc(x / _SQRT2)


def std_normal_cdf_array(x: np.ndarray) -> np.ndarray:
    """Vectorized Phi over an array (same erfc path as the scalar version)."""
    arr = np.asarray(x, dtype=np.float64)
    flat = arr.ravel()
    out = np.fromiter(
        (0.5 * math.erfc(-v / _SQRT2) for v in flat.tolist()),
        dtype=np.float64,
        count=flat.size,
    )
    return out.reshape(arr.shape)


def std_normal_sf_array(x: np.ndarray) -> np.ndarray:
    """Vectorized 1 - Phi over an array, cancellation-free."""
    arr = np.asarray(x, dtype=np.float64)
    flat = arr.ravel()
    out = np.fromiter(
        (0.5 * math.erfc(v / _SQRT2) for v in flat.tolist()),
        dtype=np.float64,
        count=flat.size,
    )
    return out.reshape(arr.shape)


# Acklam's rational approximation to the normal quantile (|error| < 1.2e-9),
# used as the starting point for Newton polishing against the erfc-based CDF.
_ACKLAM_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_ACKLAM_P_LOW = 0.02425


def _acklam(p: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if p < _ACKLAM_P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    if p > 1.0 - _ACKLAM_P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(
            ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        ) / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
        * q
        / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    )


def std_normal_quantile(p: float) -> float:
    """Inverse of std_normal_cdf, accurate to the round-trip level (~1e-15).

    Rational approximation seed plus two Newton steps against the CDF.
    """
    if not (0.0 < p < 1.0):
        raise ValueError(f"std_normal_quantile requires 0 < p < 1, got {p!r}")
    x = _acklam(p)
    for _ in range(2):
        err = std_normal_cdf(x) - p
        pdf = math.exp(-0.5 * x * x) / _SQRT2PI
        if pdf <= 0.0:
            break
        x -= err / pdf
    return x


@lru_cache(maxsize=None)
def _hermite_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Rescaled so that sum(w_i * f(z_i)) approximates E[f(Z)], Z ~ N(0,1).
    x, w = np.polynomial.hermite.hermgauss(n)
    z = x * _SQRT2
    w = w / math.sqrt(math.pi)
    z.flags.writeable = False
    w.flags.writeable = False
    return z, w


def equicorrelated_min_survivor(
    t: float,
    rho: float,
    k: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> float:
    """Pr{min of k equicorrelated standard normals >= t}.

    Uses the one-factor representation X_i = sqrt(rho) Z + sqrt(1-rho) eps_i
    and integrates Phi((sqrt(rho) z - t)/sqrt(1-rho))^k against the standard
    normal density with Gauss-Hermite quadrature. rho = 1 is the closed-form
    limit 1 - Phi(t); negative rho is not representable by this model.
    """
    if not math.isfinite(t):
        raise ValueError(f"threshold must be finite, got {t!r}")
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k!r}")
    if rho == 1.0:
        return std_normal_sf(t)
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"correlation must satisfy 0 <= rho < 1 (or exactly 1), got {rho!r}")
    z, w = _hermite_nodes(tol.quadrature_nodes)
    u = (math.sqrt(rho) * z - t) / math.sqrt(1.0 - rho)
    vals = std_normal_cdf_array(u) ** k
    result = float(np.dot(w, vals))
    return min(1.0, max(0.0, result))


def invert_monotone(
    f: Callable[[float], float],
    target: float,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> float:
    """Invert a nondecreasing function on [0, 1] by bisection.

    Returns x with a bracket of width <= tol.abs_tol_invert around the
    preimage of target. Bisection is used for unconditional robustness.
    """
    f0, f1 = f(0.0), f(1.0)
    if not (f0 <= target <= f1):
        raise ValueError(
            f"target {target!r} outside the function range [{f0!r}, {f1!r}]"
        )
    lo, hi = 0.0, 1.0
    while hi - lo > tol.abs_tol_invert:
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
