"""Stepwise decision engine.

Applies a critical-value schedule to a p-value sample as a stepup or
stepdown procedure and derives the rejection count R, false-rejection count
V (when ground truth is available) and the k-FDP. Ties among equal p-values
are broken by original index (stable sort), so results are deterministic.
A p-value exactly equal to its critical value counts as rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .schedules import STEPDOWN, STEPUP, CriticalValueSchedule


@dataclass(frozen=True)
class PValueSample:
    """n p-values, optionally labeled with ground truth.

    ``truth[i]`` is True when hypothesis i is a true null (so a rejection of
    it is a false rejection).
    """

    values: tuple[float, ...]
    truth: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("p-values must lie in [0, 1]")
        if self.truth is not None and len(self.truth) != len(self.values):
            raise ValueError("truth labels must match the number of p-values")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def n_true_null(self) -> int | None:
        return None if self.truth is None else sum(self.truth)


@dataclass(frozen=True)
class DecisionOutcome:
    """Rejection set plus derived counts.

    ``v`` and ``k_fdp`` are None when the sample carries no truth labels.
    """

    rejected: tuple[int, ...]
    r: int
    v: int | None = None
    k_fdp: float | None = None


def k_fdp(r: int, v: int, k: int) -> float:
    """False discovery proportion counted only when at least k rejections
    are false: v/r if v >= k, else 0."""
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k!r}")
    if not 0 <= v <= r:
        raise ValueError(f"need 0 <= v <= r, got v={v}, r={r}")
    if v >= k:
        return v / r
    return 0.0


def stepup_count(sorted_p: np.ndarray, alphas: np.ndarray) -> int:
    """Number of rejections of a stepup rule: the largest i with
    p_(i) <= alpha_i, or 0 when no index qualifies."""
    hits = np.nonzero(sorted_p <= alphas)[0]
    return int(hits[-1]) + 1 if hits.size else 0


def stepdown_count(sorted_p: np.ndarray, alphas: np.ndarray) -> int:
    """Number of rejections of a stepdown rule: one less than the smallest i
    with p_(i) >= alpha_i, or n when every ordered p-value is strictly
    below its critical value."""
    misses = np.nonzero(sorted_p >= alphas)[0]
    return int(misses[0]) if misses.size else len(sorted_p)


def _decide(sample: PValueSample, schedule: CriticalValueSchedule, direction: str) -> DecisionOutcome:
    if schedule.n != sample.n:
        raise ValueError(
            f"schedule length {schedule.n} does not match sample length {sample.n}"
        )
    if schedule.direction != direction:
        raise ValueError(
            f"schedule direction {schedule.direction!r} used as {direction!r}"
        )
    values = np.asarray(sample.values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    sorted_p = values[order]
    alphas = np.asarray(schedule.alphas, dtype=np.float64)
    if direction == STEPUP:
        count = stepup_count(sorted_p, alphas)
    else:
        count = stepdown_count(sorted_p, alphas)
    rejected = tuple(sorted(int(i) for i in order[:count]))
    v = None
    kfdp = None
    if sample.truth is not None:
        v = sum(1 for i in rejected if sample.truth[i])
        kfdp = k_fdp(count, v, schedule.k)
    return DecisionOutcome(rejected=rejected, r=count, v=v, k_fdp=kfdp)


def stepup(sample: PValueSample, schedule: CriticalValueSchedule) -> DecisionOutcome:
    """Apply a stepup schedule: reject the j largest-index prefix of ordered
    p-values where j = max{i : p_(i) <= alpha_i} (nothing if no such i)."""
    return _decide(sample, schedule, STEPUP)


def stepdown(sample: PValueSample, schedule: CriticalValueSchedule) -> DecisionOutcome:
    """Apply a stepdown schedule: reject the j-1 smallest p-values where
    j = min{i : p_(i) >= alpha_i} (everything if no such i)."""
    return _decide(sample, schedule, STEPDOWN)


def decide(sample: PValueSample, schedule: CriticalValueSchedule) -> DecisionOutcome:
    """Dispatch on the schedule's own direction."""
    return _decide(sample, schedule, schedule.direction)


def sample_from(values: Sequence[float], truth: Sequence[bool] | None = None) -> PValueSample:
    """Convenience constructor from any sequences."""
    return PValueSample(
        values=tuple(float(v) for v in values),
        truth=None if truth is None else tuple(bool(t) for t in truth),
    )
