"""Critical-value schedules for stepwise multiple-testing procedures.

Every generalized procedure is defined through the k-th order joint null
distribution F_k: the construction fixes a target value for F_k(alpha_i) at
each index and the schedule materializes alpha_i by inverting the model.
Targets are formed from exact integer binomial coefficients, with the ratio
taken in floating point only at the last step. Schedules carry their
F-targets alongside the inverted alphas so downstream checks can compare
targets without re-inversion noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .fk_models import FkModel, fk_eval, fk_invert

STEPUP = "stepup"
STEPDOWN = "stepdown"


@dataclass(frozen=True)
class BinomialWeights:
    """Exact subset-counting weights a_i = C(i, k) for i = k..n."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")

    def a(self, i: int) -> int:
        if not self.k <= i <= self.n:
            raise ValueError(f"index {i} outside [{self.k}, {self.n}]")
        return math.comb(i, self.k)


@dataclass(frozen=True)
class CriticalValueSchedule:
    """A nondecreasing sequence alpha_1 <= ... <= alpha_n plus identity.

    ``f_targets`` holds the F_k(alpha_i) values the construction prescribed
    (None for marginal constructions that bypass F_k). ``warning`` is set on
    schedules that are known not to control the error rate they resemble.
    """

    alphas: tuple[float, ...]
    k: int
    procedure: str
    alpha_level: float
    direction: str
    f_targets: tuple[float, ...] | None = None
    warning: str | None = None

    def __post_init__(self) -> None:
        n = len(self.alphas)
        if n == 0:
            raise ValueError("schedule must have at least one critical value")
        if not 1 <= self.k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={n}")
        if self.direction not in (STEPUP, STEPDOWN):
            raise ValueError(f"direction must be stepup or stepdown, got {self.direction!r}")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise ValueError("critical values must lie in [0, 1]")
        if any(b < a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("critical values must be nondecreasing")
        if len(set(self.alphas[: self.k])) > 1:
            raise ValueError("the first k critical values must coincide")
        if self.f_targets is not None and len(self.f_targets) != n:
            raise ValueError("f_targets must match the schedule length")

    @property
    def n(self) -> int:
        return len(self.alphas)


def _validate_inputs(n: int, k: int, alpha: float, model: FkModel | None) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if model is not None and model.k != k:
        raise ValueError(f"model order {model.k} does not match schedule order {k}")


def _invert_targets(
    targets: Sequence[float],
    model: FkModel,
    k: int,
    procedure: str,
    alpha: float,
    direction: str,
    warning: str | None = None,
) -> CriticalValueSchedule:
    alphas = tuple(fk_invert(model, t) for t in targets)
    return CriticalValueSchedule(
        alphas=alphas,
        k=k,
        procedure=procedure,
        alpha_level=alpha,
        direction=direction,
        f_targets=tuple(float(t) for t in targets),
        warning=warning,
    )


def gen_bh(n: int, k: int, alpha: float, model: FkModel) -> CriticalValueSchedule:
    """Generalized Benjamini-Hochberg stepup schedule (k-FDR controlling).

    F-targets are alpha/C(n,k) for i <= k and i(n+k-i)alpha/(k n C(n+k-i,k))
    for i >= k; the branches agree at i = k and the target at i = n is alpha.
    """
    _validate_inputs(n, k, alpha, model)
    a_n = math.comb(n, k)
    targets = []
    for i in range(1, n + 1):
        if i <= k:
            targets.append(alpha / a_n)
        else:
            targets.append(i * (n + k - i) * alpha / (k * n * math.comb(n + k - i, k)))
    return _invert_targets(targets, model, k, "gen_bh", alpha, STEPUP)


def gen_by(n: int, k: int, alpha: float, model: FkModel) -> CriticalValueSchedule:
    """Generalized Benjamini-Yekutieli stepup schedule.

    Controls the k-FDR under arbitrary dependence: F-targets are
    max(i,k)*alpha / (k C(n,k) sum_{r=k}^n 1/r).
    """
    _validate_inputs(n, k, alpha, model)
    harmonic = math.fsum(1.0 / r for r in range(k, n + 1))
    denom = k * math.comb(n, k) * harmonic
    targets = [max(i, k) * alpha / denom for i in range(1, n + 1)]
    return _invert_targets(targets, model, k, "gen_by", alpha, STEPUP)


def _holm_targets(n: int, k: int, alpha: float) -> list[float]:
    return [alpha / math.comb(n + k - max(i, k), k) for i in range(1, n + 1)]


def gen_holm_stepdown(n: int, k: int, alpha: float, model: FkModel) -> CriticalValueSchedule:
    """Generalized Holm stepdown schedule: F-targets alpha/C(n+k-max(i,k), k).

    Controls the k-FWER under arbitrary dependence.
    """
    _validate_inputs(n, k, alpha, model)
    return _invert_targets(_holm_targets(n, k, alpha), model, k, "gen_holm", alpha, STEPDOWN)


def gen_hochberg_stepup(n: int, k: int, alpha: float, model: FkModel) -> CriticalValueSchedule:
    """Generalized Hochberg stepup schedule: same constants as generalized
    Holm, applied stepup. k-FWER control requires positive dependence (MTP2).
    """
    _validate_inputs(n, k, alpha, model)
    return _invert_targets(_holm_targets(n, k, alpha), model, k, "gen_hochberg", alpha, STEPUP)


def lehmann_romano_stepdown(n: int, k: int, alpha: float) -> CriticalValueSchedule:
    """Marginal k-FWER stepdown schedule alpha_i = k*alpha/(n+k-max(i,k))."""
    _validate_inputs(n, k, alpha, None)
    alphas = tuple(k * alpha / (n + k - max(i, k)) for i in range(1, n + 1))
    return CriticalValueSchedule(
        alphas=alphas,
        k=k,
        procedure="lehmann_romano",
        alpha_level=alpha,
        direction=STEPDOWN,
    )


SIMES_WARNING = (
    "generalized Simes critical values control the k-FWER under the "
    "intersection null but do not control the k-FDR in general"
)


def gen_simes(n: int, k: int, alpha: float, model: FkModel) -> CriticalValueSchedule:
    """Generalized Simes stepup schedule: F-targets C(max(i,k),k)/C(n,k)*alpha.

    Provided for study only; the returned schedule carries a warning flag
    because these constants can fail to control the k-FDR.
    """
    _validate_inputs(n, k, alpha, model)
    a_n = math.comb(n, k)
    targets = [math.comb(max(i, k), k) * alpha / a_n for i in range(1, n + 1)]
    return _invert_targets(targets, model, k, "gen_simes", alpha, STEPUP, warning=SIMES_WARNING)


def bh_classic(n: int, alpha: float) -> CriticalValueSchedule:
    """Original Benjamini-Hochberg stepup schedule alpha_i = i*alpha/n."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    alphas = tuple(i * alpha / n for i in range(1, n + 1))
    return CriticalValueSchedule(
        alphas=alphas,
        k=1,
        procedure="bh",
        alpha_level=alpha,
        direction=STEPUP,
    )


def _check_base(n: int, k: int, base: Sequence[float]) -> list[float]:
    base = [float(b) for b in base]
    if len(base) != n:
        raise ValueError(f"base sequence must have length {n}, got {len(base)}")
    if any(not 0.0 <= b <= 1.0 for b in base):
        raise ValueError("base sequence values must lie in [0, 1]")
    if any(b2 < b1 for b1, b2 in zip(base, base[1:])):
        raise ValueError("base sequence must be nondecreasing")
    return base


def _s_prime_from_values(n: int, k: int, n0: int, f_base: Sequence[float]) -> float:
    # C(n0,k) * [F(b_{n-n0+k}) + sum_{i=k+1}^{n0} (F(b_{n-n0+i}) - F(b_{n-n0+i-1})) / a_i]
    weights = BinomialWeights(n=n0, k=k)
    head = f_base[n - n0 + k - 1]
    terms = [
        (f_base[n - n0 + i - 1] - f_base[n - n0 + i - 2]) / weights.a(i)
        for i in range(k + 1, n0 + 1)
    ]
    return math.comb(n0, k) * (head + math.fsum(terms))


def s_prime(
    n: int,
    k: int,
    n0: int,
    base: Sequence[float],
    model: FkModel,
) -> float:
    """Rescaling sum S'(n0) for a candidate base sequence.

    Evaluates C(n0,k)[F_k(b_{n-n0+k}) + sum a_i^{-1} telescoped F_k
    differences] with exact binomial weights.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if model.k != k:
        raise ValueError(f"model order {model.k} does not match schedule order {k}")
    if not k <= n0 <= n:
        raise ValueError(f"need k <= n0 <= n, got n0={n0}")
    base = _check_base(n, k, base)
    f_base = [fk_eval(model, b) for b in base]
    return _s_prime_from_values(n, k, n0, f_base)


def rescaled_stepup(
    n: int,
    k: int,
    alpha: float,
    base: Sequence[float],
    model: FkModel,
) -> CriticalValueSchedule:
    """k-FWER stepup schedule from an arbitrary nondecreasing base sequence.

    The base constants are rescaled by D' = max_{k<=n0<=n} S'(n0), giving
    F-targets alpha * F_k(b_{max(i,k)}) / D'. Valid under arbitrary
    dependence; all targets are <= alpha because D' >= F_k(b_n).
    """
    _validate_inputs(n, k, alpha, model)
    base = _check_base(n, k, base)
    f_base = [fk_eval(model, b) for b in base]
    d_prime = max(_s_prime_from_values(n, k, n0, f_base) for n0 in range(k, n + 1))
    if d_prime <= 0.0:
        raise ValueError("base sequence gives a degenerate rescaling constant")
    targets = [alpha * f_base[max(i, k) - 1] / d_prime for i in range(1, n + 1)]
    return _invert_targets(targets, model, k, "rescaled_stepup", alpha, STEPUP)


def make_schedule(
    name: str,
    n: int,
    k: int,
    alpha: float,
    model: FkModel | None = None,
    base: Sequence[float] | None = None,
) -> CriticalValueSchedule:
    """Build a schedule from a registry name.

    Names: bh, gen_bh, gen_by, gen_holm, gen_hochberg, gen_simes,
    lehmann_romano, rescaled_hochberg, rescaled_const:C (constant base C),
    and rescaled (requires an explicit ``base`` sequence).
    """
    if name == "bh":
        return bh_classic(n, alpha)
    if name == "lehmann_romano":
        return lehmann_romano_stepdown(n, k, alpha)
    if model is None:
        raise ValueError(f"procedure {name!r} requires an FkModel")
    if name == "gen_bh":
        return gen_bh(n, k, alpha, model)
    if name == "gen_by":
        return gen_by(n, k, alpha, model)
    if name == "gen_holm":
        return gen_holm_stepdown(n, k, alpha, model)
    if name == "gen_hochberg":
        return gen_hochberg_stepup(n, k, alpha, model)
    if name == "gen_simes":
        return gen_simes(n, k, alpha, model)
    if name == "rescaled_hochberg":
        hochberg = gen_hochberg_stepup(n, k, alpha, model)
        return rescaled_stepup(n, k, alpha, hochberg.alphas, model)
    if name.startswith("rescaled_const:"):
        c = float(name.split(":", 1)[1])
        return rescaled_stepup(n, k, alpha, [c] * n, model)
    if name == "rescaled":
        if base is None:
            raise ValueError("rescaled requires an explicit base sequence")
        return rescaled_stepup(n, k, alpha, base, model)
    raise ValueError(f"unknown procedure {name!r}")


PROCEDURE_NAMES = (
    "bh",
    "gen_bh",
    "gen_by",
    "gen_holm",
    "gen_hochberg",
    "gen_simes",
    "lehmann_romano",
    "rescaled_hochberg",
)
