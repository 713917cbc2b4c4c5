"""Quality measures for fuzzy partitions, 2-D scaling and (C, m) selection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import ClusterConfig, FuzzyPartition, fuzzy_cmedoids
from .core import OTSError

log = logging.getLogger(__name__)

NONE_LABEL = "none"


class SizeMismatch(OTSError):
    pass


class GridTooSmall(OTSError):
    pass


class AllCellsDegenerate(OTSError):
    pass


class GroupClusterMappingAmbiguous(OTSError):
    pass


# ---------------------------------------------------------------- pair bonds

@dataclass(frozen=True, eq=False)
class PairBonds:
    """Same-cluster (``rho``) and different-cluster (``delta``) degrees per pair.

    Pairs are listed in ``np.triu_indices(s, 1)`` order.
    """

    rho: np.ndarray
    delta: np.ndarray


def _as_membership(obj) -> np.ndarray:
    if isinstance(obj, FuzzyPartition):
        return obj.U
    return np.asarray(obj, dtype=float)


def hard_memberships(labels: Sequence) -> np.ndarray:
    """One-hot matrix for hard labels, columns in order of first appearance."""
    labels = list(labels)
    levels = list(dict.fromkeys(labels))
    U = np.zeros((len(labels), len(levels)))
    for i, lab in enumerate(labels):
        U[i, levels.index(lab)] = 1.0
    return U


def pair_bonds(U) -> PairBonds:
    U = _as_membership(U)
    s, C = U.shape
    i, j = np.triu_indices(s, 1)
    # mins[p, c, c'] = min(u_ic, u_jc')
    mins = np.minimum(U[i][:, :, None], U[j][:, None, :])
    diag = np.eye(C, dtype=bool)
    rho = mins[:, diag].max(axis=1) if C else np.zeros(len(i))
    delta = mins[:, ~diag].max(axis=1) if C > 1 else np.zeros(len(i))
    return PairBonds(rho, delta)


def _pair_counts(reference, partition) -> tuple:
    R = hard_memberships(reference) if not _looks_like_matrix(reference) else _as_membership(reference)
    Q = _as_membership(partition)
    if R.shape[0] != Q.shape[0]:
        raise SizeMismatch(f"reference has {R.shape[0]} objects, partition {Q.shape[0]}")
    br, bq = pair_bonds(R), pair_bonds(Q)
    a = float(np.sum(np.minimum(br.rho, bq.rho)))
    b = float(np.sum(np.minimum(br.rho, bq.delta)))
    c = float(np.sum(np.minimum(br.delta, bq.rho)))
    d = float(np.sum(np.minimum(br.delta, bq.delta)))
    return a, b, c, d


def _looks_like_matrix(obj) -> bool:
    if isinstance(obj, FuzzyPartition):
        return True
    arr = np.asarray(obj)
    return arr.ndim == 2


@dataclass(frozen=True)
class IndexValue:
    value: float
    degenerate: bool = False

    def __float__(self):
        return self.value


def arif_value(reference, partition) -> IndexValue:
    """Fuzzy adjusted Rand index with a flag for a vanishing denominator."""
    a, b, c, d = _pair_counts(reference, partition)
    den = (a + b) * (b + d) + (a + c) * (c + d)
    if den == 0.0:
        return IndexValue(0.0, True)
    return IndexValue(2.0 * (a * d - b * c) / den)


def jif_value(reference, partition) -> IndexValue:
    a, b, c, _ = _pair_counts(reference, partition)
    den = a + b + c
    if den == 0.0:
        return IndexValue(0.0, True)
    return IndexValue(a / den)


def arif(reference, partition) -> float:
    """Fuzzy ARI between hard ``reference`` labels and a fuzzy partition.

    Returns 0 when the denominator vanishes; use :func:`arif_value` to see the flag.
    """
    return arif_value(reference, partition).value


def jif(reference, partition) -> float:
    return jif_value(reference, partition).value


# ------------------------------------------------------ correct classification

def map_groups_to_clusters(U: np.ndarray, groups: Sequence) -> dict:
    """Assign each group label to a distinct cluster by total membership mass.

    Raises :class:`GroupClusterMappingAmbiguous` if another assignment reaches
    the same mass.
    """
    levels = list(dict.fromkeys(groups))
    mass = np.array([U[[g == lev for g in groups]].sum(axis=0) for lev in levels])
    rows, cols = linear_sum_assignment(mass, maximize=True)
    best = mass[rows, cols].sum()
    tol = 1e-12 * max(1.0, abs(best))
    # forbid each chosen edge in turn; an equal optimum elsewhere means a tie
    for r, c in zip(rows, cols):
        alt = mass.copy()
        alt[r, c] = -1e300
        try:
            ar, ac = linear_sum_assignment(alt, maximize=True)
        except ValueError:
            continue
        if alt[ar, ac].sum() >= best - tol:
            raise GroupClusterMappingAmbiguous("groups map to clusters in more than one way")
    return {levels[r]: int(c) for r, c in zip(rows, cols)}


def correct_classification(partition, truth: Sequence, cutoff: float = 0.7,
                           none_label: str = NONE_LABEL) -> bool:
    """Whether a trial counts as correctly classified at ``cutoff``.

    Regular series need membership above ``cutoff`` in their group's cluster;
    series labelled ``none_label`` need every membership at or below it.
    """
    U = _as_membership(partition)
    truth = list(truth)
    if U.shape[0] != len(truth):
        raise SizeMismatch("partition and truth sizes differ")
    regular = [i for i, t in enumerate(truth) if t != none_label]
    groups = [truth[i] for i in regular]
    if len(set(groups)) != U.shape[1]:
        raise OTSError(f"{len(set(groups))} regular groups but {U.shape[1]} clusters")
    try:
        mapping = map_groups_to_clusters(U[regular], groups)
    except GroupClusterMappingAmbiguous:
        return False
    for i, g in zip(regular, groups):
        if not U[i, mapping[g]] > cutoff:
            return False
    for i, t in enumerate(truth):
        if t == none_label and np.any(U[i] > cutoff):
            return False
    return True


def aufc(m_grid: Sequence[float], rates: Sequence[float]) -> float:
    """Trapezoidal area under a rate-versus-fuzzifier curve."""
    m = np.asarray(m_grid, dtype=float)
    r = np.asarray(rates, dtype=float)
    if m.shape != r.shape:
        raise SizeMismatch("grid and rates differ in length")
    if m.size < 2:
        raise GridTooSmall("need at least two grid points")
    if np.any(np.diff(m) <= 0):
        raise OTSError("m-grid must be strictly increasing")
    return float(np.trapezoid(r, m)) if hasattr(np, "trapezoid") else float(np.trapz(r, m))


# ------------------------------------------------------------------ scaling

@dataclass(frozen=True, eq=False)
class Embedding2D:
    points: np.ndarray
    stress: float
    r2: float
    iterations: int = 0
    stress_history: tuple = field(default=(), repr=False)


def _pdist(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt(np.sum(diff ** 2, axis=-1))


def stress(D: np.ndarray, X: np.ndarray) -> float:
    """Normalized stress of configuration ``X`` against dissimilarities ``D``."""
    D = np.asarray(D, dtype=float)
    den = float(np.sum(D ** 2))
    if den == 0.0:
        return 0.0
    return math.sqrt(float(np.sum((_pdist(X) - D) ** 2)) / den)


def classical_scaling(D: np.ndarray, k: int = 2) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    s = D.shape[0]
    J = np.eye(s) - 1.0 / s
    B = -0.5 * J @ (D ** 2) @ J
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1][:k]
    vals = np.clip(vals[order], 0.0, None)
    X = vecs[:, order] * np.sqrt(vals)
    if X.shape[1] < k:
        X = np.hstack([X, np.zeros((s, k - X.shape[1]))])
    return X


def mds_2d(D, max_iter: int = 300, tol: float = 1e-8) -> Embedding2D:
    """Metric 2-D scaling by stress majorization from a classical-scaling start.

    Stress is checked to be non-increasing at every step.
    """
    D = np.asarray(getattr(D, "total", D), dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise OTSError("distance matrix must be square")
    s = D.shape[0]
    X = classical_scaling(D)
    cur = stress(D, X)
    history = [cur]
    it = 0
    for it in range(1, max_iter + 1):
        if cur == 0.0:
            break
        dist = _pdist(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist > 0, D / dist, 0.0)
        B = -ratio
        np.fill_diagonal(B, 0.0)
        np.fill_diagonal(B, -B.sum(axis=1))
        Xn = B @ X / s
        new = stress(D, Xn)
        if new > cur + 1e-12 * max(cur, 1.0):
            raise AssertionError(f"stress increased: {cur} -> {new}")
        history.append(new)
        X = Xn
        improvement = (cur - new) / cur
        cur = new
        if improvement < tol:
            break
    iu = np.triu_indices(s, 1)
    fitted = _pdist(X)[iu]
    target = D[iu]
    if fitted.size >= 2 and np.std(fitted) > 0 and np.std(target) > 0:
        r2 = float(np.corrcoef(target, fitted)[0, 1] ** 2)
    else:
        r2 = 1.0 if np.allclose(fitted, target) else 0.0
    return Embedding2D(X, cur, r2, it, tuple(history))


# -------------------------------------------------------- validity indices

INDEX_NAMES = ("xb", "kwon", "tang", "bensaid")


def validity_indices(partition: FuzzyPartition, D, m: Optional[float] = None) -> dict:
    """Xie-Beni, Kwon, Tang and Bensaid indices adapted to medoids.

    ``D`` is used directly as the squared-distance surrogate. Coincident
    medoids (zero separation) give ``inf`` for every index.
    """
    D = np.asarray(getattr(D, "total", D), dtype=float)
    U = partition.U
    if m is None:
        raise OTSError("the fuzzifier m is required")
    s, C = U.shape
    med = list(partition.medoids)
    Dm = D[:, med]
    W = U ** m
    J = float(np.sum(W * Dm))
    sep = D[np.ix_(med, med)]
    off = ~np.eye(C, dtype=bool)
    min_sep = float(sep[off].min()) if C > 1 else 0.0
    if len(set(med)) < C or min_sep <= 0.0:
        return {k: math.inf for k in INDEX_NAMES}
    xb = J / (s * min_sep)
    kwon = (J + float(np.mean(Dm))) / min_sep
    tang = (J + float(sep[off].sum()) / (C * (C - 1))) / (min_sep + 1.0 / C)
    size = U.sum(axis=0)
    bensaid = float(np.sum(np.sum(W * Dm, axis=0) / (size * sep.sum(axis=1))))
    return {"xb": xb, "kwon": kwon, "tang": tang, "bensaid": bensaid}


@dataclass
class GridSelection:
    cells: list
    raw: dict
    standardized: list
    best: tuple
    partitions: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "cells": [{"C": C, "m": m, "indices": self.raw[(C, m)], "score": z}
                      for (C, m), z in zip(self.cells, self.standardized)],
            "best": {"C": self.best[0], "m": self.best[1]},
        }


def _fit_cell(args):
    D, C, m, seed, restarts, max_iter = args
    cfg = ClusterConfig(C=C, m=m, seed=seed, restarts=restarts, max_iter=max_iter)
    part = fuzzy_cmedoids(D, cfg)
    return part, validity_indices(part, D, m)


def select_c_m(D, C_grid: Sequence[int], m_grid: Sequence[float], seed: int = 0,
               restarts: int = 1, max_iter: int = 100, threads: int = 1) -> GridSelection:
    """Pick ``(C, m)`` minimizing the average of z-standardized validity indices.

    Cells with an infinite index are excluded from standardization and cannot win.
    """
    D = np.asarray(getattr(D, "total", D), dtype=float)
    s = D.shape[0]
    C_grid, m_grid = list(C_grid), list(m_grid)
    if not C_grid or not m_grid:
        raise GridTooSmall("grids must be non-empty")
    if any(C < 2 or C > s - 1 for C in C_grid):
        raise OTSError(f"C-grid must lie within [2, {s - 1}]")
    cells = [(int(C), float(m)) for C in C_grid for m in m_grid]
    jobs = [(D, C, m, seed, restarts, max_iter) for C, m in cells]
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_fit_cell, jobs))
    else:
        results = [_fit_cell(j) for j in jobs]

    raw = {cell: res[1] for cell, res in zip(cells, results)}
    table = np.array([[raw[c][k] for k in INDEX_NAMES] for c in cells])
    ok = np.all(np.isfinite(table), axis=1)
    if not ok.any():
        raise AllCellsDegenerate("every cell has coincident medoids")
    good = table[ok]
    mu = good.mean(axis=0)
    sd = good.std(axis=0)
    sd[sd == 0] = 1.0
    z = np.full(len(cells), math.inf)
    z[ok] = ((good - mu) / sd).mean(axis=1)
    best = cells[int(np.argmin(z))]
    parts = {cell: res[0] for cell, res in zip(cells, results)}
    return GridSelection(cells, raw, [float(v) for v in z], best, parts)
