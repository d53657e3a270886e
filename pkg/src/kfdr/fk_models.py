"""Joint null distribution models for the maximum of k null p-values.

A model represents F_k(x) = Pr{max of any k null p-values <= x}, assumed
identical across k-subsets (exchangeability). Three kinds are supported:

- ``independent_uniform``: F_k(x) = x^k exactly.
- ``equicorrelated_normal_one_sided``: p-values are one-sided tails of
  equicorrelated standard normals (P = 1 - Phi(X)), so F_k is an orthant
  survivor probability computed by quadrature.
- ``empirical``: a monotone piecewise-linear grid fitted from simulated
  null draws, for dependence structures with no closed form.

Models are immutable; evaluation and inversion are pure functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import (
    DEFAULT_TOLERANCES,
    ToleranceConfig,
    equicorrelated_min_survivor,
    invert_monotone,
    std_normal_quantile,
)

INDEPENDENT_UNIFORM = "independent_uniform"
EQUICORRELATED = "equicorrelated_normal_one_sided"
EMPIRICAL = "empirical"

_KINDS = (INDEPENDENT_UNIFORM, EQUICORRELATED, EMPIRICAL)


@dataclass(frozen=True)
class FkModel:
    """Distribution of the maximum of k exchangeable null p-values."""

    kind: str
    k: int
    rho: float | None = None
    grid: tuple[tuple[float, float], ...] | None = None
    tol: ToleranceConfig = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"order k must be >= 1, got {self.k!r}")
        if self.kind == EQUICORRELATED:
            if self.rho is None:
                raise ValueError("equicorrelated model requires rho")
            if self.rho != 1.0 and not (0.0 <= self.rho < 1.0):
                raise ValueError(f"rho must be in [0, 1], got {self.rho!r}")
        if self.kind == EMPIRICAL:
            if not self.grid:
                raise ValueError("empirical model requires a grid")
            xs = [p[0] for p in self.grid]
            fs = [p[1] for p in self.grid]
            if (xs[0], fs[0]) != (0.0, 0.0) or (xs[-1], fs[-1]) != (1.0, 1.0):
                raise ValueError("empirical grid must be pinned at (0,0) and (1,1)")
            if any(b < a for a, b in zip(xs, xs[1:])) or any(
                b < a for a, b in zip(fs, fs[1:])
            ):
                raise ValueError("empirical grid must be nondecreasing in both coordinates")

    def describe(self) -> str:
        if self.kind == EQUICORRELATED:
            return f"{self.kind}(k={self.k}, rho={self.rho})"
        if self.kind == EMPIRICAL:
            return f"{self.kind}(k={self.k}, grid={len(self.grid or ())} points)"
        return f"{self.kind}(k={self.k})"


def independent_fk(k: int) -> FkModel:
    return FkModel(kind=INDEPENDENT_UNIFORM, k=k)


def equicorrelated_fk(k: int, rho: float, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> FkModel:
    return FkModel(kind=EQUICORRELATED, k=k, rho=rho, tol=tol)


def fk_eval(model: FkModel, x: float) -> float:
    """Evaluate F_k(x) for x in [0, 1]."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"argument must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if model.kind == INDEPENDENT_UNIFORM:
        return x**model.k
    if model.kind == EQUICORRELATED:
        # {P <= x} = {X >= Phi^-1(1-x)}; -quantile(x) keeps small-x precision.
        t = -std_normal_quantile(x)
        return equicorrelated_min_survivor(t, model.rho, model.k, model.tol)
    xs, fs = _grid_arrays(model)
    return float(np.interp(x, xs, fs))


def fk_invert(model: FkModel, target: float) -> float:
    """Smallest x with F_k(x) = target, within the inversion tolerance."""
    if not (0.0 <= target <= 1.0):
        raise ValueError(f"target must lie in [0, 1], got {target!r}")
    if target == 0.0:
        return 0.0
    if target == 1.0:
        return 1.0
    if model.kind == INDEPENDENT_UNIFORM:
        return target ** (1.0 / model.k)
    if model.kind == EQUICORRELATED:
        return invert_monotone(lambda x: fk_eval(model, x), target, model.tol)
    xs, fs = _grid_arrays(model)
    # Leftmost preimage: drop repeated F-levels so interp sees a strict axis.
    fs_unique, idx = np.unique(fs, return_index=True)
    return float(np.interp(target, fs_unique, xs[idx]))


def fit_empirical_fk(
    null_sampler: Callable[[int], np.ndarray],
    draws: int,
    grid_size: int = 512,
) -> FkModel:
    """Estimate an empirical FkModel from simulated null p-value k-tuples.

    ``null_sampler(m)`` must return an (m, k) array of exchangeable null
    p-values; it owns its RNG state, so the fit is deterministic given the
    sampler's seed, ``draws`` and ``grid_size``. The grid stores the sample
    quantiles of the k-tuple maxima at ``grid_size`` equally spaced levels,
    pinned at (0,0) and (1,1).
    """
    if draws < 1:
        raise ValueError("draws must be positive")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    sample = np.asarray(null_sampler(draws), dtype=np.float64)
    if sample.ndim != 2 or sample.shape[0] != draws:
        raise ValueError("sampler must return a (draws, k) array")
    if sample.min() < 0.0 or sample.max() > 1.0:
        raise ValueError("sampler produced p-values outside [0, 1]")
    k = sample.shape[1]
    maxima = sample.max(axis=1)
    if maxima.max() == maxima.min():
        raise ValueError("degenerate sampler: all k-tuple maxima are identical")
    levels = np.arange(1, grid_size) / grid_size
    xs = np.quantile(maxima, levels)
    xs = np.maximum.accumulate(xs)
    grid = [(0.0, 0.0)]
    grid += [(float(x), float(f)) for x, f in zip(xs, levels)]
    grid.append((1.0, 1.0))
    return FkModel(kind=EMPIRICAL, k=k, grid=tuple(grid))


def save_empirical_csv(model: FkModel, path: str) -> None:
    """Serialize an empirical model to a two-column CSV with header x,fk."""
    if model.kind != EMPIRICAL:
        raise ValueError("only empirical models serialize to CSV")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "fk"])
        for x, f in model.grid or ():
            writer.writerow([repr(x), repr(f)])


def load_empirical_csv(path: str, k: int) -> FkModel:
    """Load an empirical model from the x,fk CSV format."""
    grid: list[tuple[float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["x", "fk"]:
            raise ValueError(f"{path}: expected header 'x,fk'")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: malformed row {row!r}")
            grid.append((float(row[0]), float(row[1])))
    return FkModel(kind=EMPIRICAL, k=k, grid=tuple(grid))


def _grid_arrays(model: FkModel) -> tuple[np.ndarray, np.ndarray]:
    grid = np.asarray(model.grid, dtype=np.float64)
    return grid[:, 0], grid[:, 1]
