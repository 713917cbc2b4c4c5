"""Fuzzy C-medoids solvers on precomputed distance matrices.

Two solvers are provided:

* :func:`fuzzy_cmedoids` minimizes ``sum_i sum_c u_ic^m d(i, medoid_c)``.
* :func:`weighted_fuzzy_cmedoids` splits the distance into a marginal and a
  serial part and also learns the weight ``beta`` in
  ``beta^2 d_M + (1 - beta)^2 d_B``.

Both alternate closed-form membership updates with a medoid search until the
medoids stop changing or ``max_iter`` is reached.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import OTSError

log = logging.getLogger(__name__)

_MONO_TOL = 1e-9


class TooFewSeries(OTSError):
    pass


class DegenerateDistances(OTSError):
    pass


@dataclass(frozen=True)
class ClusterConfig:
    C: int
    m: float
    max_iter: int = 100
    seed: int = 0
    weighted: bool = False
    initial_beta: float = 0.5
    restarts: int = 1

    def __post_init__(self):
        if int(self.C) != self.C or self.C < 2:
            raise OTSError(f"number of clusters must be an integer >= 2, got {self.C!r}")
        if not self.m > 1.0:
            raise OTSError(f"fuzzifier m must be > 1, got {self.m!r}")
        if self.max_iter < 1:
            raise OTSError("max_iter must be positive")
        if not 0.0 <= self.initial_beta <= 1.0:
            raise OTSError("initial_beta must lie in [0, 1]")
        if self.restarts < 1:
            raise OTSError("restarts must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise OTSError("seed must be an unsigned 64-bit integer")


@dataclass(eq=False)
class FuzzyPartition:
    """Result of a fuzzy C-medoids run.

    ``history`` holds the objective after each full iteration.
    """

    U: np.ndarray
    medoids: tuple
    objective: float
    iterations: int
    converged: bool
    beta: Optional[float] = None
    history: list = field(default_factory=list, repr=False)

    @property
    def s(self) -> int:
        return self.U.shape[0]

    @property
    def C(self) -> int:
        return self.U.shape[1]

    def to_dict(self, ids=None, config: Optional[ClusterConfig] = None, **extra) -> dict:
        ids = list(ids) if ids is not None else [str(i) for i in range(self.s)]
        doc = {
            "ids": ids,
            "memberships": self.U.tolist(),
            "medoids": [ids[j] for j in self.medoids],
            "medoid_indices": list(map(int, self.medoids)),
            "beta": self.beta,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if config is not None:
            doc["config"] = asdict(config)
        doc.update(extra)
        return doc

    def to_json(self, ids=None, config=None, **extra) -> str:
        return json.dumps(self.to_dict(ids, config, **extra))

    @classmethod
    def from_dict(cls, doc: dict) -> "FuzzyPartition":
        U = np.asarray(doc["memberships"], dtype=float)
        if "medoid_indices" in doc:
            med = tuple(int(j) for j in doc["medoid_indices"])
        else:
            med = tuple(doc["ids"].index(m) for m in doc["medoids"])
        return cls(U, med, float(doc["objective"]), int(doc["iterations"]),
                   bool(doc["converged"]), doc.get("beta"))


def update_memberships(dist: np.ndarray, m: float) -> np.ndarray:
    """Closed-form memberships given each object's distances to the medoids.

    ``dist`` has shape ``(s, C)`` (a single row is also accepted). Rows with
    zero distance to some medoids split their mass evenly over those medoids.
    """
    d = np.asarray(dist, dtype=float)
    single = d.ndim == 1
    d = np.atleast_2d(d)
    if np.any(d < 0):
        raise OTSError("distances must be non-negative")
    U = np.empty_like(d)
    zero = d == 0.0
    has_zero = zero.any(axis=1)
    if has_zero.any():
        z = zero[has_zero].astype(float)
        U[has_zero] = z / z.sum(axis=1, keepdims=True)
    rest = ~has_zero
    if rest.any():
        # u_ic proportional to d_ic^(-1/(m-1)); normalize in log space
        logw = -np.log(d[rest]) / (m - 1.0)
        logw -= logw.max(axis=1, keepdims=True)
        w = np.exp(logw)
        U[rest] = w / w.sum(axis=1, keepdims=True)
    return U[0] if single else U


def _medoid_costs(U: np.ndarray, D: np.ndarray, m: float) -> np.ndarray:
    # cost[c, j] = sum_i u_ic^m D[i, j]
    return (U ** m).T @ D


def update_medoids(U: np.ndarray, D: np.ndarray, m: float,
                   current: Optional[tuple] = None) -> tuple:
    """Per-cluster argmin of ``sum_i u_ic^m D[i, j]`` over candidates ``j``.

    Ties go to the smallest index. When a candidate is already taken by an
    earlier cluster, the later cluster gets its best free candidate. If that
    greedy repair would cost more than keeping ``current``, the optimal set of
    distinct medoids is used instead so the objective cannot increase.
    """
    cost = _medoid_costs(U, D, m)
    C, s = cost.shape
    chosen = []
    repaired = False
    for c in range(C):
        order = np.argsort(cost[c], kind="stable")
        for j in order:
            if int(j) not in chosen:
                if chosen and order[0] in chosen:
                    repaired = True
                chosen.append(int(j))
                break
    if repaired:
        greedy_cost = sum(cost[c, j] for c, j in enumerate(chosen))
        rows, cols = linear_sum_assignment(cost)
        best = [0] * C
        for r, col in zip(rows, cols):
            best[r] = int(col)
        best_cost = sum(cost[c, j] for c, j in enumerate(best))
        if current is not None:
            cur_cost = sum(cost[c, j] for c, j in enumerate(current))
            if greedy_cost > cur_cost + 1e-12 * max(1.0, abs(cur_cost)):
                log.debug("greedy medoid repair worse than current; using exact assignment")
                chosen = best
        elif best_cost < greedy_cost:
            chosen = best
    return tuple(chosen)


def objective(U: np.ndarray, D: np.ndarray, medoids, m: float) -> float:
    dm = D[:, list(medoids)]
    return float(np.sum(U ** m * dm))


def crispify(partition) -> np.ndarray:
    """Hard labels from the largest membership per row (ties to the lower index)."""
    U = partition.U if isinstance(partition, FuzzyPartition) else np.asarray(partition)
    return np.argmax(U, axis=1)


def _check_matrix(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise OTSError("distance matrix must be square")
    if np.any(D < 0) or not np.all(np.isfinite(D)):
        raise OTSError("distances must be finite and non-negative")
    return D


def initial_medoids(s: int, C: int, seed: int) -> tuple:
    if C > s:
        raise TooFewSeries(f"cannot form {C} clusters from {s} series")
    rng = np.random.default_rng(seed)
    return tuple(int(j) for j in rng.choice(s, size=C, replace=False))


def _run(D_of_beta, m: float, medoids: tuple, max_iter: int,
         beta: Optional[float], learn_beta: bool, DM=None, DB=None) -> FuzzyPartition:
    D = D_of_beta(beta)
    history = []
    converged = False
    it = 0
    U = None
    prev_obj = np.inf
    for it in range(1, max_iter + 1):
        old = medoids
        U = update_memberships(D[:, list(medoids)], m)
        if learn_beta:
            try:
                beta = update_beta(U, DM, DB, m, medoids)
            except DegenerateDistances:
                pass
            D = D_of_beta(beta)
        medoids = update_medoids(U, D, m, current=medoids)
        obj = objective(U, D, medoids, m)
        if obj > prev_obj + _MONO_TOL * max(1.0, abs(prev_obj)):
            raise AssertionError(f"objective increased: {prev_obj} -> {obj}")
        history.append(obj)
        prev_obj = obj
        if medoids == old:
            converged = True
            break
    # final memberships consistent with the returned medoids
    U = update_memberships(D[:, list(medoids)], m)
    obj = objective(U, D, medoids, m)
    return FuzzyPartition(U, medoids, obj, it, converged, beta, history)


def _best_of(runs) -> FuzzyPartition:
    best = None
    for part in runs:
        if best is None or part.objective < best.objective:
            best = part
    return best


def fuzzy_cmedoids(D, config: ClusterConfig, init: Optional[tuple] = None) -> FuzzyPartition:
    """Standard fuzzy C-medoids on a total distance matrix.

    With ``restarts > 1`` the run with the lowest objective is kept; restart
    ``r`` draws its initial medoids from seed ``config.seed + r``.
    """
    D = _check_matrix(D)
    s = D.shape[0]
    if config.C > s:
        raise TooFewSeries(f"cannot form {config.C} clusters from {s} series")
    starts = [tuple(init)] if init is not None else [
        initial_medoids(s, config.C, config.seed + r) for r in range(config.restarts)]
    return _best_of(
        _run(lambda _b: D, config.m, st, config.max_iter, None, False) for st in starts)


def update_beta(U: np.ndarray, DM: np.ndarray, DB: np.ndarray, m: float, medoids) -> float:
    """Optimal weight for fixed memberships and medoids."""
    W = U ** m
    cols = list(medoids)
    num = float(np.sum(W * DB[:, cols]))
    den = float(np.sum(W * (DM[:, cols] + DB[:, cols])))
    if den <= 0.0:
        raise DegenerateDistances("all medoid distances vanish; beta is undefined")
    return min(1.0, max(0.0, num / den))


def combined_distance(DM: np.ndarray, DB: np.ndarray, beta: float) -> np.ndarray:
    return beta ** 2 * DM + (1.0 - beta) ** 2 * DB


def update_memberships_weighted(dm_rows, db_rows, beta: float, m: float) -> np.ndarray:
    return update_memberships(
        combined_distance(np.asarray(dm_rows, float), np.asarray(db_rows, float), beta), m)


def weighted_objective(U, DM, DB, medoids, m, beta) -> float:
    return objective(U, combined_distance(DM, DB, beta), medoids, m)


def weighted_fuzzy_cmedoids(DM, DB, config: ClusterConfig, init: Optional[tuple] = None,
                            freeze_beta: bool = False) -> FuzzyPartition:
    """Weighted fuzzy C-medoids on marginal and serial component matrices.

    Each iteration updates memberships, then ``beta``, then the medoids. With
    ``freeze_beta`` the weight stays at ``config.initial_beta``.
    """
    DM = _check_matrix(DM)
    DB = _check_matrix(DB)
    if DM.shape != DB.shape:
        raise OTSError("component matrices must have the same shape")
    s = DM.shape[0]
    if config.C > s:
        raise TooFewSeries(f"cannot form {config.C} clusters from {s} series")
    starts = [tuple(init)] if init is not None else [
        initial_medoids(s, config.C, config.seed + r) for r in range(config.restarts)]
    return _best_of(
        _run(lambda b: combined_distance(DM, DB, b), config.m, st, config.max_iter,
             config.initial_beta, not freeze_beta, DM, DB)
        for st in starts)


def cluster_matrix(dm, config: ClusterConfig) -> FuzzyPartition:
    """Run the solver selected by ``config.weighted`` on a distance matrix object."""
    if config.weighted:
        return weighted_fuzzy_cmedoids(dm.marginal, dm.serial, config)
    return fuzzy_cmedoids(dm.total, config)
