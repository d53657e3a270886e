"""Monte Carlo harness for error-rate estimation.

Draws equicorrelated normal test statistics via the one-factor model,
converts them to one-sided p-values, runs a panel of stepwise procedures and
estimates k-FDR, k-FWER, FDR and average power with standard errors. Each
iteration gets its own counter-based RNG stream keyed by (seed, iteration),
so serial and parallel execution produce bit-identical results. Also
provides the exact closed-form lower bound showing that generalized Simes
critical values can fail to control the k-FDR.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from . import engine
from .fk_models import FkModel, equicorrelated_fk, independent_fk
from .numerics import std_normal_sf_array
from .schedules import STEPUP, CriticalValueSchedule, make_schedule

_MODEL_FREE = ("bh", "lehmann_romano")


@dataclass(frozen=True)
class SimulationConfig:
    """One experiment: n tests, n0 true nulls, procedures run at level alpha.

    ``force_nonnull_zero`` replaces the n1 = n - n0 nonnull p-values with
    exact zeros, emulating a procedure that always rejects the nonnulls
    first; this realizes the k-FDR violation construction.
    """

    n: int
    n0: int
    k: int
    alpha: float
    rho: float
    iterations: int
    seed: int
    procedures: tuple[str, ...]
    mu_alt: float = 2.0
    force_nonnull_zero: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n!r}")
        if not 0 <= self.n0 <= self.n:
            raise ValueError(f"need 0 <= n0 <= n, got n0={self.n0}, n={self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit nonnegative integer")
        if not self.procedures:
            raise ValueError("at least one procedure is required")

    @property
    def n1(self) -> int:
        return self.n - self.n0


@dataclass(frozen=True)
class ProcedureEstimates:
    procedure: str
    kfdr_hat: float
    kfdr_se: float
    kfwer_hat: float
    kfwer_se: float
    fdr_hat: float
    fdr_se: float
    power_hat: float
    power_se: float


@dataclass(frozen=True)
class SimulationSummary:
    config: SimulationConfig
    results: tuple[ProcedureEstimates, ...]


def null_model_for(config: SimulationConfig) -> FkModel:
    """The joint null model implied by the config's correlation."""
    if config.rho == 0.0:
        return independent_fk(config.k)
    return equicorrelated_fk(config.k, config.rho)


def _iteration_rng(seed: int, iteration_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed << 64) + iteration_index))


def draw_sample(config: SimulationConfig, iteration_index: int) -> engine.PValueSample:
    """One draw of n one-sided p-values with truth labels attached.

    X_i = mu_i + sqrt(rho) Z + sqrt(1-rho) eps_i with the first n0 means at
    zero and the rest at mu_alt; p_i = 1 - Phi(X_i). The common factor Z is
    drawn first, then the n idiosyncratic terms.
    """
    p = _draw_pvalues(config, iteration_index)
    truth = (True,) * config.n0 + (False,) * config.n1
    return engine.PValueSample(values=tuple(float(v) for v in p), truth=truth)


def _draw_pvalues(config: SimulationConfig, iteration_index: int) -> np.ndarray:
    rng = _iteration_rng(config.seed, iteration_index)
    draws = rng.standard_normal(config.n + 1)
    z, eps = draws[0], draws[1:]
    mu = np.zeros(config.n)
    mu[config.n0 :] = config.mu_alt
    x = mu + math.sqrt(config.rho) * z + math.sqrt(1.0 - config.rho) * eps
    p = std_normal_sf_array(x)
    if config.force_nonnull_zero:
        p[config.n0 :] = 0.0
    return p


def _build_schedules(config: SimulationConfig) -> list[CriticalValueSchedule]:
    model: FkModel | None = None
    schedules = []
    for name in config.procedures:
        if name in _MODEL_FREE:
            schedules.append(
                make_schedule(name, n=config.n, k=config.k, alpha=config.alpha)
            )
        else:
            if model is None:
                model = null_model_for(config)
            schedules.append(
                make_schedule(name, n=config.n, k=config.k, alpha=config.alpha, model=model)
            )
    return schedules


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    se = float(np.std(values, ddof=1) / math.sqrt(values.size))
    return mean, se


def run_experiment(config: SimulationConfig) -> SimulationSummary:
    """Estimate error rates and power for every configured procedure.

    Per iteration and procedure the k-FDP (at the config's k), the indicator
    of at least k false rejections, the FDP and the rejected fraction of
    false nulls are recorded; means and standard errors are taken over the
    fixed per-iteration arrays, so reruns are bit-identical.
    """
    schedules = _build_schedules(config)
    n_proc = len(schedules)
    iters = config.iterations
    kfdp_arr = np.empty((n_proc, iters))
    kfwer_arr = np.empty((n_proc, iters))
    fdp_arr = np.empty((n_proc, iters))
    power_arr = np.empty((n_proc, iters))

    crit_arrays = [np.asarray(s.alphas) for s in schedules]
    n0, n1, k = config.n0, config.n1, config.k
    for it in range(iters):
        p = _draw_pvalues(config, it)
        order = np.argsort(p, kind="stable")
        sorted_p = p[order]
        for j, schedule in enumerate(schedules):
            if schedule.direction == STEPUP:
                r = engine.stepup_count(sorted_p, crit_arrays[j])
            else:
                r = engine.stepdown_count(sorted_p, crit_arrays[j])
            v = int(np.count_nonzero(order[:r] < n0))
            kfdp_arr[j, it] = engine.k_fdp(r, v, k)
            kfwer_arr[j, it] = 1.0 if v >= k else 0.0
            fdp_arr[j, it] = v / r if r > 0 else 0.0
            power_arr[j, it] = (r - v) / n1 if n1 > 0 else 0.0

    results = []
    for j, schedule in enumerate(schedules):
        kfdr_hat, kfdr_se = _mean_se(kfdp_arr[j])
        kfwer_hat, kfwer_se = _mean_se(kfwer_arr[j])
        fdr_hat, fdr_se = _mean_se(fdp_arr[j])
        power_hat, power_se = _mean_se(power_arr[j])
        results.append(
            ProcedureEstimates(
                procedure=config.procedures[j],
                kfdr_hat=kfdr_hat,
                kfdr_se=kfdr_se,
                kfwer_hat=kfwer_hat,
                kfwer_se=kfwer_se,
                fdr_hat=fdr_hat,
                fdr_se=fdr_se,
                power_hat=power_hat,
                power_se=power_se,
            )
        )
    return SimulationSummary(config=config, results=tuple(results))


def figure_sweep(
    base_config: SimulationConfig, n0_grid: Sequence[int]
) -> list[SimulationSummary]:
    """Run the experiment across a grid of true-null counts."""
    summaries = []
    for n0 in n0_grid:
        if not base_config.k <= n0 <= base_config.n:
            raise ValueError(
                f"n0 grid values must lie in [k, n], got n0={n0} with "
                f"k={base_config.k}, n={base_config.n}"
            )
        summaries.append(run_experiment(dataclasses.replace(base_config, n0=int(n0))))
    return summaries


SWEEP_COLUMNS = (
    "n0",
    "procedure",
    "kfdr_hat",
    "kfdr_se",
    "kfwer_hat",
    "kfwer_se",
    "fdr_hat",
    "fdr_se",
    "power_hat",
    "power_se",
    "iterations",
    "seed",
)


def write_sweep_csv(summaries: Sequence[SimulationSummary], fh: IO[str]) -> None:
    """Emit one CSV row per (n0, procedure) with the mandatory header."""
    writer = csv.writer(fh)
    writer.writerow(SWEEP_COLUMNS)
    for summary in summaries:
        cfg = summary.config
        for est in summary.results:
            writer.writerow(
                [
                    cfg.n0,
                    est.procedure,
                    repr(est.kfdr_hat),
                    repr(est.kfdr_se),
                    repr(est.kfwer_hat),
                    repr(est.kfwer_se),
                    repr(est.fdr_hat),
                    repr(est.fdr_se),
                    repr(est.power_hat),
                    repr(est.power_se),
                    cfg.iterations,
                    cfg.seed,
                ]
            )


def counterexample_bound(n0: int, n1: int, alpha: float) -> tuple[float, float]:
    """Exact lower bound on the 2-FDR of the generalized Simes stepup rule
    when the n1 nonnull p-values are always rejected first.

    With i.i.d. uniform null p-values and k = 2, the (n1+2)-th critical
    value is c = sqrt((n1+2)(n1+1) alpha / (n(n-1))) and the bound is
    (2/(n1+2)) * Pr{at least 2 of n0 uniforms <= c}. The bound can exceed
    alpha, demonstrating non-control.
    """
    if n0 < 2:
        raise ValueError(f"need n0 >= 2 for a second-order bound, got {n0!r}")
    if n1 < 0:
        raise ValueError(f"n1 must be nonnegative, got {n1!r}")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha!r}")
    if alpha == 0.0:
        return 0.0, 0.0
    n = n0 + n1
    c = math.sqrt((n1 + 2) * (n1 + 1) * alpha / (n * (n - 1)))
    at_least_two = 1.0 - (1.0 - c) ** n0 - n0 * c * (1.0 - c) ** (n0 - 1)
    bound = 2.0 / (n1 + 2) * at_least_two
    return c, bound
