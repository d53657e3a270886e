"""Independent brute-force references.

Naive stepwise procedures computed by literal definition scans, plus exact
enumeration checks of the order-statistic probability inequalities that
justify the schedule constructions. Everything enumerates small discrete
instances; nothing here shares code with the engine or schedules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .engine import DecisionOutcome, PValueSample, k_fdp
from .schedules import CriticalValueSchedule

_MAX_ENUM_N = 6


@dataclass(frozen=True)
class DiscreteJointDistribution:
    """Finite-support joint distribution of an n-vector of p-values."""

    support: tuple[tuple[float, ...], ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise ValueError("support must be nonempty")
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights must have equal length")
        n = len(self.support[0])
        if any(len(atom) != n for atom in self.support):
            raise ValueError("all support atoms must have the same dimension")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")

    @property
    def n(self) -> int:
        return len(self.support[0])


def brute_force_stepup(
    sample: PValueSample, schedule: CriticalValueSchedule
) -> DecisionOutcome:
    """Literal scan over all i of the stepup definition."""
    ranked = sorted(range(sample.n), key=lambda i: (sample.values[i], i))
    j_su = 0
    for i in range(1, sample.n + 1):
        if sample.values[ranked[i - 1]] <= schedule.alphas[i - 1]:
            j_su = i
    return _outcome(sample, schedule, ranked[:j_su])


def brute_force_stepdown(
    sample: PValueSample, schedule: CriticalValueSchedule
) -> DecisionOutcome:
    """Literal scan over all i of the stepdown definition."""
    ranked = sorted(range(sample.n), key=lambda i: (sample.values[i], i))
    j_sd = None
    for i in range(1, sample.n + 1):
        if sample.values[ranked[i - 1]] >= schedule.alphas[i - 1]:
            j_sd = i
            break
    count = sample.n if j_sd is None else j_sd - 1
    return _outcome(sample, schedule, ranked[:count])


def _outcome(
    sample: PValueSample, schedule: CriticalValueSchedule, rejected: Sequence[int]
) -> DecisionOutcome:
    rejected = tuple(sorted(rejected))
    v = None
    kfdp = None
    if sample.truth is not None:
        v = sum(1 for i in rejected if sample.truth[i])
        kfdp = k_fdp(len(rejected), v, schedule.k)
    return DecisionOutcome(rejected=rejected, r=len(rejected), v=v, k_fdp=kfdp)


def _check_criticals(criticals: Sequence[float], n: int, k: int) -> list[float]:
    criticals = [float(c) for c in criticals]
    if len(criticals) != n - k + 1:
        raise ValueError(
            f"expected {n - k + 1} criticals for indices {k}..{n}, got {len(criticals)}"
        )
    if any(c2 < c1 for c1, c2 in zip(criticals, criticals[1:])):
        raise ValueError("criticals must be nondecreasing")
    return criticals


def lemma21_check(
    dist: DiscreteJointDistribution, criticals: Sequence[float], k: int
) -> tuple[float, float]:
    """Union bound for order statistics against the subset-sum bound.

    Returns (lhs, rhs) where lhs = Pr{union over i=k..n of X_(i) <= c_i} and
    rhs = sum over k-subsets of Pr{max <= c_k} plus the a_i^{-1}-weighted
    layer probabilities, both by exact enumeration. lhs <= rhs must hold.
    """
    n = dist.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > _MAX_ENUM_N:
        raise ValueError(f"enumeration supports n <= {_MAX_ENUM_N}, got n={n}")
    c = _check_criticals(criticals, n, k)

    lhs_terms = []
    for atom, w in zip(dist.support, dist.weights):
        x = sorted(atom)
        if any(x[i - 1] <= c[i - k] for i in range(k, n + 1)):
            lhs_terms.append(w)
    lhs = math.fsum(lhs_terms)

    subsets = list(itertools.combinations(range(n), k))
    head_terms = []
    layer_terms: list[list[float]] = [[] for _ in range(k + 1, n + 1)]
    for atom, w in zip(dist.support, dist.weights):
        for subset in subsets:
            m = max(atom[j] for j in subset)
            if m <= c[0]:
                head_terms.append(w)
            for pos, i in enumerate(range(k + 1, n + 1)):
                if c[i - 1 - k] < m <= c[i - k]:
                    layer_terms[pos].append(w)
    rhs = math.fsum(head_terms) + math.fsum(
        math.fsum(terms) / math.comb(i, k)
        for i, terms in zip(range(k + 1, n + 1), layer_terms)
    )
    return lhs, rhs


def common_max_cdf(
    dist: DiscreteJointDistribution, k: int, atol: float = 1e-12
) -> Callable[[float], float]:
    """The common CDF of the max over any k coordinates.

    Verifies exchangeability in the k-th order sense: every k-subset must
    induce the same max distribution (within atol at every support level);
    non-exchangeable input is rejected.
    """
    n = dist.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    levels = sorted({v for atom in dist.support for v in atom})
    subsets = list(itertools.combinations(range(n), k))
    per_subset = []
    for subset in subsets:
        cdf = [
            math.fsum(
                w
                for atom, w in zip(dist.support, dist.weights)
                if max(atom[j] for j in subset) <= level
            )
            for level in levels
        ]
        per_subset.append(cdf)
    ref = per_subset[0]
    for cdf in per_subset[1:]:
        if any(abs(a - b) > atol for a, b in zip(ref, cdf)):
            raise ValueError("distribution is not exchangeable at order k")

    def g_k(x: float) -> float:
        total = 0.0
        for level, value in zip(levels, ref):
            if level <= x:
                total = value
            else:
                break
        return total

    return g_k


def remark21_check(
    dist: DiscreteJointDistribution, criticals: Sequence[float], k: int
) -> tuple[float, float]:
    """Closed-form version of the subset-sum bound under exchangeability.

    Returns (lhs, rhs) with rhs = C(n,k)[G_k(c_k) + sum a_i^{-1} telescoped
    G_k differences]; rhs must agree with the enumerated lemma21_check rhs
    and dominate lhs.
    """
    n = dist.n
    if n > _MAX_ENUM_N:
        raise ValueError(f"enumeration supports n <= {_MAX_ENUM_N}, got n={n}")
    c = _check_criticals(criticals, n, k)
    g_k = common_max_cdf(dist, k)
    lhs, _ = lemma21_check(dist, criticals, k)
    rhs = math.comb(n, k) * (
        g_k(c[0])
        + math.fsum(
            (g_k(c[i - k]) - g_k(c[i - 1 - k])) / math.comb(i, k)
            for i in range(k + 1, n + 1)
        )
    )
    return lhs, rhs


def lemma31_check(n: int, n0: int, k: int) -> bool:
    """Pointwise inequality (n-r+k) v >= n0 k over all feasible (r, v).

    Feasible means k <= v <= min(r, n0) and r - v <= n - n0 with r <= n.
    """
    if not (1 <= k <= n0 <= n):
        raise ValueError(f"need 1 <= k <= n0 <= n, got k={k}, n0={n0}, n={n}")
    if n > 30:
        raise ValueError(f"exhaustive check supports n <= 30, got n={n}")
    for r in range(k, n + 1):
        for v in range(k, min(r, n0) + 1):
            if r - v > n - n0:
                continue
            if (n - r + k) * v < n0 * k:
                return False
    return True
