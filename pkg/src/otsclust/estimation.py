"""Per-series estimates: marginal/joint probabilities and block-distance features.

All estimators work on the count indices of an :class:`~otsclust.core.OrdinalSeries`.
Joint quantities at lag ``l`` use the normalizer ``T - l`` (no bias correction).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from .core import LagSet, LagTooLarge, OrdinalSeries, OTSError, as_lagset


class ZeroDispersion(OTSError):
    """Raised when a series is constant, so kappa is undefined."""


class ZeroVariance(OTSError):
    """Raised when the count series has zero variance, so the ACF is undefined."""


class SingularRecursion(OTSError):
    """Raised when a Durbin-Levinson pivot vanishes."""


class DegenerateSeriesWarning(UserWarning):
    pass


def _check_lag(series: OrdinalSeries, lag: int) -> int:
    lag = int(lag)
    if lag < 0:
        raise OTSError(f"lag must be non-negative, got {lag}")
    if lag >= series.T:
        raise LagTooLarge(f"lag {lag} must be smaller than T={series.T}")
    return lag


def _cum_indicators(series: OrdinalSeries) -> np.ndarray:
    # column i holds I(x_k <= s_i), i = 0..n-1
    return (series.states[:, None] <= np.arange(series.n)[None, :]).astype(float)


def _one_hot(series: OrdinalSeries) -> np.ndarray:
    out = np.zeros((series.T, series.n + 1))
    out[np.arange(series.T), series.states] = 1.0
    return out


def estimate_cumulative_marginal(series: OrdinalSeries) -> np.ndarray:
    """Return ``f_i = P(X <= s_i)`` for ``i = 0..n-1`` (``f_n = 1`` is implicit)."""
    counts = np.bincount(series.states, minlength=series.n + 1)
    return np.cumsum(counts)[:-1] / series.T


def estimate_cumulative_joint(series: OrdinalSeries, lag: int) -> np.ndarray:
    """Return the ``n x n`` matrix ``F[i, j] = P(X_{t-l} <= s_i, X_t <= s_j)``."""
    lag = _check_lag(series, lag)
    if lag == 0:
        raise OTSError("joint estimates need a positive lag")
    ind = _cum_indicators(series)
    return ind[:-lag].T @ ind[lag:] / (series.T - lag)


def estimate_pmf(series: OrdinalSeries, lags=()) -> tuple:
    """Marginal pmf (length ``n+1``) and the lagged joint pmfs.

    Returns
    -------
    p : ndarray, shape (n + 1,)
    P : list of ndarray, each (n + 1, n + 1), one per lag
    """
    counts = np.bincount(series.states, minlength=series.n + 1)
    p = counts / series.T
    joints = []
    if len(lags):
        onehot = _one_hot(series)
        for lag in lags:
            lag = _check_lag(series, lag)
            if lag == 0:
                raise OTSError("joint estimates need a positive lag")
            joints.append(onehot[:-lag].T @ onehot[lag:] / (series.T - lag))
    return p, joints


def marginal_features(f: np.ndarray) -> tuple:
    """Location, dispersion, asymmetry and skewness from a cumulative vector.

    These are expectations of the block distance ``|i - j|``:

    * ``loc  = E|C - 0|``
    * ``disp = E|C - C'|`` for an independent copy ``C'``
    * ``asym = sum_i (1 - f_i - f_{n-i-1})^2``
    * ``skew = E|C - n| - E|C - 0| = 2 * sum_i f_i - n``

    ``skew`` lies in ``[-n, n]``; the metrics layer divides every feature by ``n``.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    f_ext = np.append(f, 1.0)
    loc = float(np.sum(np.arange(1, n + 1) * np.diff(f_ext)))
    disp = float(2.0 * np.sum(f * (1.0 - f)))
    asym = float(np.sum((1.0 - f - f[::-1]) ** 2))
    skew = float(2.0 * np.sum(f) - n)
    return loc, disp, asym, skew


def _kappa_from(f: np.ndarray, F: np.ndarray) -> float:
    denom = float(np.sum(f * (1.0 - f)))
    if denom <= 0.0:
        raise ZeroDispersion("series is constant; ordinal kappa is undefined")
    return float(np.sum(np.diag(F) - f ** 2) / denom)


def ordinal_kappa(series: OrdinalSeries, lag: int) -> float:
    """Ordinal Cohen's kappa at ``lag`` from the cumulative estimates.

    The raw estimate is returned; it is not clamped to ``[-1, 1]``.
    """
    f = estimate_cumulative_marginal(series)
    if np.sum(f * (1.0 - f)) <= 0.0:
        raise ZeroDispersion(f"series {series.id!r} is constant")
    return _kappa_from(f, estimate_cumulative_joint(series, lag))


def partial_kappas(kappas: Sequence[float]) -> np.ndarray:
    """Partial kappas via the Durbin-Levinson recursion.

    ``kappas[k]`` is the value at lag ``k + 1``; the sequence is treated as an
    autocorrelation function.
    """
    rho = np.asarray(kappas, dtype=float)
    if not np.all(np.isfinite(rho)):
        raise OTSError("kappa values must be finite")
    L = rho.shape[0]
    out = np.zeros(L)
    if L == 0:
        return out
    phi = np.zeros(L)
    v = 1.0
    for k in range(L):
        if k == 0:
            a = rho[0]
        else:
            a = (rho[k] - np.dot(phi[:k], rho[k - 1::-1])) / v
        out[k] = a
        phi[:k] = phi[:k] - a * phi[:k][::-1]
        phi[k] = a
        v = v * (1.0 - a * a)
        if k < L - 1 and abs(v) < 1e-14:
            raise SingularRecursion(f"pivot vanished at lag {k + 1}")
    return out


def count_acf(series: OrdinalSeries, lag: int) -> float:
    """Sample autocorrelation of the count indices at ``lag``."""
    lag = _check_lag(series, lag)
    x = series.states.astype(float)
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom <= 0.0:
        raise ZeroVariance(f"series {series.id!r} has zero variance")
    if lag == 0:
        return 1.0
    return float(np.dot(xc[:-lag], xc[lag:]) / denom)


@dataclass(frozen=True, eq=False)
class OrdinalFeatures:
    loc: float
    disp: float
    asym: float
    skew: float
    kappas: Dict[int, float]

    def marginal_vector(self, n: int) -> np.ndarray:
        """The normalized vector used by the feature-based distance."""
        return np.array([self.loc, 2.0 * self.disp, self.asym, self.skew]) / n


@dataclass(frozen=True, eq=False)
class SeriesRepr:
    """Everything the distances need from one series, computed once."""

    id: str
    n: int
    T: int
    lags: tuple
    f: np.ndarray
    F: tuple
    p: np.ndarray
    P: tuple
    features: OrdinalFeatures
    acf: np.ndarray
    degenerate: bool = False
    warnings: tuple = field(default=())

    @property
    def kappa_vector(self) -> np.ndarray:
        return np.array([self.features.kappas[l] for l in self.lags])


def build_repr(series: OrdinalSeries, lags) -> SeriesRepr:
    """Compute all estimates for ``series`` at the given lags.

    Constant series get ``kappa = 0`` and ``acf = 0`` at every lag, with
    ``degenerate=True`` and a :class:`DegenerateSeriesWarning`.
    """
    lagset = as_lagset(lags)
    lagset.check_against([series])
    f = estimate_cumulative_marginal(series)
    ind = _cum_indicators(series)
    F = tuple(ind[:-l].T @ ind[l:] / (series.T - l) for l in lagset)
    p, P = estimate_pmf(series, lagset.lags)
    loc, disp, asym, skew = marginal_features(f)

    notes = []
    try:
        kappas = {l: _kappa_from(f, Fl) for l, Fl in zip(lagset, F)}
    except ZeroDispersion:
        kappas = {l: 0.0 for l in lagset}
        notes.append("kappa set to 0 (constant series)")
    try:
        acf = np.array([count_acf(series, l) for l in lagset])
    except ZeroVariance:
        acf = np.zeros(len(lagset))
        notes.append("acf set to 0 (constant series)")
    if notes:
        warnings.warn(f"series {series.id!r}: " + "; ".join(notes),
                      DegenerateSeriesWarning, stacklevel=2)

    for arr in (f, p, acf, *F, *P):
        arr.setflags(write=False)
    return SeriesRepr(
        id=series.id, n=series.n, T=series.T, lags=lagset.lags, f=f, F=F, p=p,
        P=tuple(P), features=OrdinalFeatures(loc, disp, asym, skew, kappas),
        acf=acf, degenerate=bool(notes), warnings=tuple(notes))


def build_reprs(series: Sequence[OrdinalSeries], lags) -> list:
    lagset = as_lagset(lags)
    return [build_repr(x, lagset) for x in series]
