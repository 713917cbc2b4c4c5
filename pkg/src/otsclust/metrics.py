"""Dissimilarities between ordinal series and pairwise distance matrices.

Every distance is computed from cached :class:`~otsclust.estimation.SeriesRepr`
objects, so a matrix over ``s`` series costs ``O(s)`` estimation work.

Metric tags
-----------
``d1``
    Squared Euclidean distance between cumulative marginal vectors plus the
    same on the lagged cumulative joint matrices.
``d2``
    Squared Euclidean distance between normalized block-distance features
    ``(loc, 2 disp, asym, skew) / n`` plus squared differences of ordinal kappa.
``pmf``
    As ``d1`` but on probability mass functions (ignores the ordering).
``acf``
    Squared Euclidean distance between count autocorrelations; there is no
    marginal part, so the whole value is reported as ``serial``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LagMismatch, OTSError, RangeMismatch, as_lagset, common_range
from .estimation import SeriesRepr, build_repr

METRICS = ("d1", "d2", "pmf", "acf")


class LengthMismatch(OTSError):
    pass


@dataclass(frozen=True)
class DistanceRecord:
    marginal: float
    serial: float

    @property
    def total(self) -> float:
        return self.marginal + self.serial


def _lag_positions(a: SeriesRepr, b: SeriesRepr, lags) -> list:
    if a.n != b.n:
        raise RangeMismatch(f"range sizes differ: n={a.n} vs n={b.n}")
    lags = a.lags if lags is None else as_lagset(lags).lags
    try:
        return [(a.lags.index(l), b.lags.index(l)) for l in lags]
    except ValueError:
        raise LagMismatch(
            f"requested lags {lags} not available in both representations "
            f"({a.lags} / {b.lags})") from None


def d1_components(a: SeriesRepr, b: SeriesRepr, lags=None) -> DistanceRecord:
    pos = _lag_positions(a, b, lags)
    marginal = float(np.sum((a.f - b.f) ** 2))
    serial = float(sum(np.sum((a.F[i] - b.F[j]) ** 2) for i, j in pos))
    return DistanceRecord(marginal, serial)


def d2_components(a: SeriesRepr, b: SeriesRepr, lags=None) -> DistanceRecord:
    pos = _lag_positions(a, b, lags)
    va = a.features.marginal_vector(a.n)
    vb = b.features.marginal_vector(b.n)
    marginal = float(np.sum((va - vb) ** 2))
    ka, kb = a.kappa_vector, b.kappa_vector
    serial = float(sum((ka[i] - kb[j]) ** 2 for i, j in pos))
    return DistanceRecord(marginal, serial)


def d_pmf_components(a: SeriesRepr, b: SeriesRepr, lags=None) -> DistanceRecord:
    pos = _lag_positions(a, b, lags)
    marginal = float(np.sum((a.p - b.p) ** 2))
    serial = float(sum(np.sum((a.P[i] - b.P[j]) ** 2) for i, j in pos))
    return DistanceRecord(marginal, serial)


def d_acf(a: SeriesRepr, b: SeriesRepr, lags=None) -> float:
    pos = _lag_positions(a, b, lags)
    return float(sum((a.acf[i] - b.acf[j]) ** 2 for i, j in pos))


def d_acf_components(a: SeriesRepr, b: SeriesRepr, lags=None) -> DistanceRecord:
    return DistanceRecord(0.0, d_acf(a, b, lags))


def d1m_via_pmf(p: Sequence[float], q: Sequence[float]) -> float:
    """Cumulative marginal distance written in terms of the two pmfs.

    ``sum_i (n-i) e_i^2 + 2 sum_{j<k} (n-k) e_j e_k`` with ``e = p - q`` and
    indices running over ``0..n-1``. Used as an independent check on the
    cumulative form.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LengthMismatch(f"pmf lengths differ: {p.shape[0]} vs {q.shape[0]}")
    n = p.shape[0] - 1
    e = p - q
    total = 0.0
    for i in range(n):
        total += (n - i) * e[i] ** 2
    for j in range(n - 1):
        for k in range(j + 1, n):
            total += 2.0 * (n - k) * e[j] * e[k]
    return float(total)


_COMPONENTS = {
    "d1": d1_components,
    "d2": d2_components,
    "pmf": d_pmf_components,
    "acf": d_acf_components,
}


def distance(a: SeriesRepr, b: SeriesRepr, metric: str, lags=None) -> DistanceRecord:
    try:
        fn = _COMPONENTS[metric]
    except KeyError:
        raise OTSError(f"unknown metric {metric!r}; choose from {METRICS}") from None
    return fn(a, b, lags)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric component matrices with a zero diagonal."""

    ids: tuple
    metric: str
    lags: tuple
    marginal: np.ndarray
    serial: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.marginal + self.serial

    def __len__(self):
        return len(self.ids)

    def to_json(self) -> str:
        doc = {
            "metric": self.metric,
            "lags": list(self.lags),
            "ids": list(self.ids),
            "marginal": self.marginal.tolist(),
            "serial": self.serial.tolist(),
            "total": self.total.tolist(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "DistanceMatrix":
        doc = json.loads(text)
        return cls(tuple(doc["ids"]), doc["metric"], tuple(doc["lags"]),
                   np.asarray(doc["marginal"], dtype=float),
                   np.asarray(doc["serial"], dtype=float))

    def to_csv(self, component: str = "total") -> str:
        mat = getattr(self, component)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.ids)
        for row in mat:
            writer.writerow(["%.17g" % v for v in row])
        return buf.getvalue()


def read_matrix_csv(text: str) -> tuple:
    """Parse the CSV written by :meth:`DistanceMatrix.to_csv` into ``(ids, matrix)``."""
    rows = list(csv.reader(io.StringIO(text)))
    ids = tuple(rows[0])
    mat = np.array([[float(v) for v in row] for row in rows[1:] if row])
    if mat.shape != (len(ids), len(ids)):
        raise OTSError("distance CSV is not square")
    return ids, mat


def pairwise_matrix(data, metric: str = "d1", lags=None) -> DistanceMatrix:
    """Pairwise component matrices over ``data``.

    ``data`` may hold series (representations are built here) or prebuilt
    :class:`SeriesRepr` objects. Output order follows input order.
    """
    data = list(data)
    if metric not in _COMPONENTS:
        raise OTSError(f"unknown metric {metric!r}; choose from {METRICS}")
    if data and not isinstance(data[0], SeriesRepr):
        if lags is None:
            raise OTSError("lags are required when building from raw series")
        common_range(data)
        lagset = as_lagset(lags)
        lagset.check_against(data)
        reprs = [build_repr(x, lagset) for x in data]
    else:
        reprs = data
        if len({r.n for r in reprs}) > 1:
            raise RangeMismatch("representations have different range sizes")
    use = reprs[0].lags if (lags is None and reprs) else (
        as_lagset(lags).lags if lags is not None else ())
    s = len(reprs)
    marg = np.zeros((s, s))
    ser = np.zeros((s, s))
    if s:
        marg, ser = _fast_components(reprs, metric, use)
    return DistanceMatrix(tuple(r.id for r in reprs), metric, tuple(use), marg, ser)


def _stack(reprs, metric: str, lags) -> tuple:
    # one row of features per series; squared Euclidean on rows gives the components
    pos = [[r.lags.index(l) for l in lags] for r in reprs]
    if any(len(p) != len(lags) for p in pos):
        raise LagMismatch("lags missing from some representations")
    if metric == "d1":
        M = np.stack([r.f for r in reprs])
        B = np.stack([np.concatenate([r.F[i].ravel() for i in ps]) for r, ps in zip(reprs, pos)])
    elif metric == "pmf":
        M = np.stack([r.p for r in reprs])
        B = np.stack([np.concatenate([r.P[i].ravel() for i in ps]) for r, ps in zip(reprs, pos)])
    elif metric == "d2":
        M = np.stack([r.features.marginal_vector(r.n) for r in reprs])
        B = np.stack([r.kappa_vector[ps] for r, ps in zip(reprs, pos)])
    else:
        M = np.zeros((len(reprs), 0))
        B = np.stack([r.acf[ps] for r, ps in zip(reprs, pos)])
    return M, B


def _sqdist(X: np.ndarray) -> np.ndarray:
    # row by row keeps memory O(s * dim); (a - b)**2 == (b - a)**2 exactly, so D is symmetric
    s = X.shape[0]
    D = np.empty((s, s))
    for i in range(s):
        diff = X - X[i]
        D[i] = np.einsum("jk,jk->j", diff, diff)
    np.fill_diagonal(D, 0.0)
    return D


def _fast_components(reprs, metric, lags) -> tuple:
    M, B = _stack(reprs, metric, lags)
    return _sqdist(M), _sqdist(B)
