"""Automatic choice of the lag set from per-series serial-independence tests.

For every series and every lag up to ``L_max`` the partial ordinal kappa is
standardized with its asymptotic null distribution; the largest significant lag
over all series defines the lag set ``{1, ..., L*}``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .core import LagSet, OrdinalSeries, OTSError
from .estimation import (SingularRecursion, ZeroDispersion, _kappa_from,
                         estimate_cumulative_joint, estimate_cumulative_marginal,
                         marginal_features, partial_kappas)

log = logging.getLogger(__name__)

CORRECTIONS = ("bonferroni", "none")


@dataclass(frozen=True)
class LagSelectionConfig:
    alpha: float = 0.05
    L_max: int = 5
    correction: str = "bonferroni"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise OTSError("alpha must lie in (0, 1)")
        if int(self.L_max) != self.L_max or self.L_max < 1:
            raise OTSError("L_max must be a positive integer")
        if self.correction not in CORRECTIONS:
            raise OTSError(f"correction must be one of {CORRECTIONS}")


@dataclass
class LagSelectionReport:
    per_series: dict
    L_star: int
    lagset: LagSet
    corrected_alpha: float
    critical_value: float
    fallback: bool = False
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_series": self.per_series,
            "L_star": self.L_star,
            "lags": list(self.lagset.lags),
            "corrected_alpha": self.corrected_alpha,
            "critical_value": self.critical_value,
            "fallback": self.fallback,
            "skipped": self.skipped,
        }


def normal_quantile(theta: float) -> float:
    return float(ndtri(theta))


def kappa_test_statistics(series: OrdinalSeries, L_max: int) -> np.ndarray:
    """Absolute standardized partial kappas at lags ``1..L_max``.

    Lags past a vanishing Durbin-Levinson pivot are returned as ``nan``.
    """
    if L_max >= series.T:
        raise OTSError(f"L_max={L_max} must be smaller than T={series.T}")
    T = series.T
    f = estimate_cumulative_marginal(series)
    if np.sum(f * (1.0 - f)) <= 0.0:
        raise ZeroDispersion(f"series {series.id!r} is constant")
    kappas = np.array([_kappa_from(f, estimate_cumulative_joint(series, l))
                       for l in range(1, L_max + 1)])
    partial = np.full(L_max, np.nan)
    for upto in range(L_max, 0, -1):
        try:
            partial[:upto] = partial_kappas(kappas[:upto])
            break
        except SingularRecursion:
            continue
    disp = marginal_features(f)[1]
    cov = np.minimum.outer(f, f) - np.outer(f, f)
    scale = 2.0 * np.sqrt(np.sum(cov ** 2))
    return np.abs(np.sqrt(T) * disp * (partial + 1.0 / T) / scale)


def kappa_test_statistic(series: OrdinalSeries, lag: int) -> float:
    """Absolute standardized partial kappa at a single lag."""
    return float(kappa_test_statistics(series, lag)[lag - 1])


def select_lags(data: Sequence[OrdinalSeries], config: LagSelectionConfig = LagSelectionConfig()
                ) -> LagSelectionReport:
    data = list(data)
    s = len(data)
    if s == 0:
        raise OTSError("no series given")
    short = [x.id for x in data if x.T <= config.L_max]
    if short:
        raise OTSError(f"series shorter than L_max + 1: {short}")
    n_tests = s * config.L_max if config.correction == "bonferroni" else 1
    alpha_c = config.alpha / n_tests
    crit = normal_quantile(1.0 - alpha_c / 2.0)

    per_series, skipped = {}, []
    for x in data:
        try:
            stats = kappa_test_statistics(x, config.L_max)
        except ZeroDispersion:
            warnings.warn(f"series {x.id!r} is constant; skipped in lag selection")
            skipped.append(x.id)
            per_series[x.id] = 0
            continue
        sig = np.flatnonzero(np.nan_to_num(stats, nan=0.0) > crit)
        per_series[x.id] = int(sig[-1] + 1) if sig.size else 0

    L_star = max(per_series.values())
    fallback = L_star == 0
    if fallback:
        warnings.warn("no significant lag found; falling back to lag set {1}")
    lagset = LagSet.upto(max(L_star, 1))
    return LagSelectionReport(per_series, L_star, lagset, alpha_c, crit, fallback, skipped)
