"""Monte-Carlo harness over the simulation scenarios.

Trial ``k`` simulates its data set with seed ``seed + k`` and clusters with the
same seed, so any single trial can be replayed on its own.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .clustering import ClusterConfig, cluster_matrix
from .core import OTSError
from .estimation import build_reprs
from .evaluation import aufc, arif_value, correct_classification, jif_value
from .metrics import METRICS, pairwise_matrix
from .simgen import NONE_LABEL, scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchConfig:
    scenario: int
    metrics: tuple = ("d1",)
    m_grid: tuple = (1.2,)
    T: Optional[int] = 600
    trials: int = 50
    seed: int = 0
    lags: Optional[tuple] = None
    C: Optional[int] = None
    restarts: int = 1
    max_iter: int = 100
    weighted: bool = False
    cutoff: float = 0.7
    per_cluster: int = 5

    def __post_init__(self):
        if self.trials < 1:
            raise OTSError("trials must be positive")
        if not self.m_grid:
            raise OTSError("m-grid must be non-empty")
        if any(m <= 1.0 for m in self.m_grid):
            raise OTSError("every m must exceed 1")
        bad = [mt for mt in self.metrics if mt not in METRICS]
        if bad:
            raise OTSError(f"unknown metrics {bad}; choose from {METRICS}")
        if not 0.0 < self.cutoff < 1.0:
            raise OTSError("cutoff must lie in (0, 1)")


@dataclass
class BenchReport:
    config: BenchConfig
    records: list
    summary: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"scenario": self.config.scenario, "T": self.config.T,
                "trials": self.config.trials, "summary": self.summary}

    def trial_rows(self) -> list:
        return self.records

    def mean(self, metric: str, m: float, key: str = "arif") -> float:
        vals = [r[key] for r in self.records if r["metric"] == metric and r["m"] == m]
        return float(np.mean(vals))

    def curve(self, metric: str) -> tuple:
        ms = list(self.config.m_grid)
        return ms, [self.mean(metric, m, "correct") for m in ms]


def run_trial(cfg: BenchConfig, k: int) -> list:
    seed = cfg.seed + k
    data = scenario(cfg.scenario, cfg.T, seed, cfg.per_cluster)
    lags = cfg.lags or data.spec.lags
    C = cfg.C or data.spec.C
    reprs = build_reprs(data.series, lags)
    truth = data.labels
    regular = [i for i, t in enumerate(truth) if t != NONE_LABEL]
    ref = [truth[i] for i in regular]
    out = []
    for metric in cfg.metrics:
        dm = pairwise_matrix(reprs, metric, lags)
        weighted = cfg.weighted and metric != "acf"
        for m in cfg.m_grid:
            conf = ClusterConfig(C=C, m=float(m), seed=seed, restarts=cfg.restarts,
                                 max_iter=cfg.max_iter, weighted=weighted)
            part = cluster_matrix(dm, conf)
            U = part.U[regular]
            row = {"trial": k, "seed": seed, "metric": metric, "m": float(m),
                   "arif": arif_value(ref, U).value, "jif": jif_value(ref, U).value,
                   "objective": part.objective, "iterations": part.iterations,
                   "converged": part.converged, "beta": part.beta}
            if data.spec.isolated is not None:
                row["correct"] = float(correct_classification(part, truth, cfg.cutoff))
            out.append(row)
    return out


def _run_trial_args(args):
    return run_trial(*args)


def run_bench(cfg: BenchConfig, threads: int = 1) -> BenchReport:
    """Run all trials; results are ordered by trial regardless of ``threads``."""
    jobs = [(cfg, k) for k in range(cfg.trials)]
    if threads > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            chunks = list(ex.map(_run_trial_args, jobs))
    else:
        chunks = [run_trial(*j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    report = BenchReport(cfg, records)
    report.summary = summarize(report)
    return report


def summarize(report: BenchReport) -> list:
    cfg = report.config
    rows = []
    for metric in cfg.metrics:
        entry = {"metric": metric, "T": cfg.T, "by_m": []}
        for m in cfg.m_grid:
            item = {"m": float(m), "arif": report.mean(metric, float(m), "arif"),
                    "jif": report.mean(metric, float(m), "jif")}
            if "correct" in report.records[0]:
                item["rate"] = report.mean(metric, float(m), "correct")
            entry["by_m"].append(item)
        if "correct" in report.records[0]:
            ms, rates = report.curve(metric)
            entry["max_rate"] = max(rates)
            entry["aufc"] = aufc(ms, rates) if len(ms) >= 2 else None
        rows.append(entry)
    return rows


def m_grid(start: float, stop: float, step: float) -> tuple:
    """Inclusive arithmetic grid rounded to 10 decimals."""
    if step <= 0 or stop < start:
        raise OTSError("grid needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))
