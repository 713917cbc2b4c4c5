"""Command-line entry point ``otsclust``.

Exit codes: 0 ok, 2 configuration or validation error, 3 IO error,
4 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .bench import BenchConfig, m_grid, run_bench
from .clustering import ClusterConfig, DegenerateDistances, FuzzyPartition, cluster_matrix
from .core import OTSError, as_lagset, common_range
from .estimation import ZeroDispersion, ZeroVariance, build_reprs
from .evaluation import (AllCellsDegenerate, arif_value, correct_classification, jif_value,
                         mds_2d, select_c_m)
from .fileio import (FileFormatError, read_json, read_labels, read_series, write_labels,
                     write_series)
from .lagsel import CORRECTIONS, LagSelectionConfig, select_lags
from .metrics import METRICS, DistanceMatrix, pairwise_matrix, read_matrix_csv
from .simgen import NONE_LABEL, scenario

log = logging.getLogger("otsclust")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DEGENERATE = 0, 2, 3, 4


class ConfigError(OTSError):
    pass


# ------------------------------------------------------------------ parsing helpers

def parse_lags(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    try:
        return as_lagset(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"invalid lag list {text!r}") from None


def parse_grid(text: str, cast=float) -> tuple:
    """``a,b,c`` or ``start:stop:step`` (inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            vals = m_grid(start, stop, step)
        else:
            vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"invalid grid {text!r}") from None
    if not vals:
        raise ConfigError("grid is empty")
    if cast is int:
        if any(v != int(v) for v in vals):
            raise ConfigError(f"grid {text!r} must hold integers")
        return tuple(int(v) for v in vals)
    return vals


def _threads(args) -> int:
    if args.threads is not None:
        t = args.threads
    else:
        env = os.environ.get("OTSCLUST_THREADS", "1")
        try:
            t = int(env)
        except ValueError:
            raise ConfigError(f"OTSCLUST_THREADS must be an integer, got {env!r}") from None
    if t < 1:
        raise ConfigError("thread count must be positive")
    return t


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(doc, out) -> None:
    _emit(json.dumps(doc, indent=1) + "\n", out)


def _load(args) -> list:
    data = read_series(args.input)
    common_range(data)
    return data


def _resolve_lags(args, data):
    lags = parse_lags(args.lags)
    if lags != "auto":
        return lags, None
    report = select_lags(data, LagSelectionConfig(args.alpha, args.lmax))
    log.info("selected lags %s", report.lagset.lags)
    return report.lagset, report


def _matrix(args, data):
    lags, report = _resolve_lags(args, data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dm = pairwise_matrix(data, args.metric, lags)
    for w in caught:
        log.warning("%s", w.message)
    return dm, report


# --------------------------------------------------------------------- commands

def cmd_simulate(args) -> int:
    T = None if args.scenario == 5 else args.length
    data = scenario(args.scenario, T, args.seed, args.per_cluster)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_series(out / "series.jsonl", data.series)
    write_labels(out / "labels.json", data.ids, data.labels,
                 {"scenario": args.scenario, "seed": args.seed, "C": data.spec.C,
                  "lags": list(data.spec.lags)})
    log.info("wrote %d series to %s", len(data.series), out)
    return EXIT_OK


def cmd_features(args) -> int:
    data = _load(args)
    lags, _ = _resolve_lags(args, data)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reprs = build_reprs(data, lags)
    rows = []
    for r in reprs:
        ft = r.features
        rows.append({"id": r.id, "n": r.n, "T": r.T, "loc": ft.loc, "disp": ft.disp,
                     "asym": ft.asym, "skew": ft.skew,
                     "kappa": {str(l): ft.kappas[l] for l in r.lags},
                     "cumulative_marginal": r.f.tolist(), "degenerate": r.degenerate})
    _emit_json({"lags": list(as_lagset(lags).lags), "series": rows}, args.output)
    return EXIT_OK


def cmd_distmat(args) -> int:
    data = _load(args)
    dm, _ = _matrix(args, data)
    if args.format == "csv":
        _emit(dm.to_csv(args.component), args.output)
    else:
        _emit(dm.to_json() + "\n", args.output)
    return EXIT_OK


def cmd_select_lags(args) -> int:
    data = _load(args)
    cfg = LagSelectionConfig(args.alpha, args.lmax, args.correction)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = select_lags(data, cfg)
    for w in caught:
        log.warning("%s", w.message)
    _emit_json(report.to_dict(), args.output)
    return EXIT_OK


def cmd_cluster(args) -> int:
    data = _load(args)
    if args.clusters > len(data):
        raise ConfigError(f"cannot form {args.clusters} clusters from {len(data)} series")
    cfg = ClusterConfig(C=args.clusters, m=args.fuzziness, max_iter=args.max_iter,
                        seed=args.seed, weighted=args.weighted, restarts=args.restarts)
    if args.weighted and args.metric == "acf":
        raise ConfigError("the weighted solver needs a metric with a marginal part")
    dm, report = _matrix(args, data)
    if not np.any(dm.total > 0):
        raise DegenerateDistances("all pairwise distances are zero")
    part = cluster_matrix(dm, cfg)
    extra = {"metric": args.metric, "lags": list(dm.lags)}
    if report is not None:
        extra["lag_selection"] = report.to_dict()
    _emit(json.dumps(part.to_dict(dm.ids, cfg, **extra), indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_select_cm(args) -> int:
    data = _load(args)
    dm, _ = _matrix(args, data)
    if not np.any(dm.total > 0):
        raise DegenerateDistances("all pairwise distances are zero")
    sel = select_c_m(dm.total, parse_grid(args.c_grid, int), parse_grid(args.m_grid),
                     seed=args.seed, restarts=args.restarts, threads=_threads(args))
    doc = sel.to_dict()
    doc.update({"metric": args.metric, "lags": list(dm.lags)})
    _emit_json(_finite(doc), args.output)
    return EXIT_OK


def _finite(obj):
    # JSON has no infinity; the sentinel is written as null
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def cmd_evaluate(args) -> int:
    doc = read_json(args.partition)
    try:
        part = FuzzyPartition.from_dict(doc)
        ids = doc["ids"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed partition file: {exc}") from None
    truth = read_labels(args.labels, ids)
    regular = [i for i, t in enumerate(truth) if t != NONE_LABEL]
    ref = [truth[i] for i in regular]
    U = part.U[regular]
    a, j = arif_value(ref, U), jif_value(ref, U)
    out = {"arif": a.value, "jif": j.value, "degenerate": a.degenerate or j.degenerate}
    if len(regular) < len(truth) or args.cutoff_always:
        try:
            out["correct"] = correct_classification(part, truth, args.cutoff)
        except OTSError as exc:
            out["correct"] = None
            log.warning("correct classification not available: %s", exc)
        out["cutoff"] = args.cutoff
    _emit_json(out, args.output)
    return EXIT_OK


def cmd_mds(args) -> int:
    if args.matrix:
        path = Path(args.matrix)
        if path.suffix.lower() == ".csv":
            ids, D = read_matrix_csv(path.read_text(encoding="utf-8"))
        else:
            dm = DistanceMatrix.from_json(path.read_text(encoding="utf-8"))
            ids, D = dm.ids, dm.total
    else:
        if not args.input:
            raise ConfigError("give --input series or --matrix")
        data = _load(args)
        dm, _ = _matrix(args, data)
        ids, D = dm.ids, dm.total
    emb = mds_2d(D)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "x", "y"])
    for sid, (x, y) in zip(ids, emb.points):
        w.writerow([sid, "%.17g" % x, "%.17g" % y])
    summary = {"stress": emb.stress, "r2": emb.r2, "iterations": emb.iterations}
    if args.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
        log.info("stress=%.6g r2=%.6f", emb.stress, emb.r2)
    else:
        Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
        _emit_json(summary, None)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise ConfigError("trials must be positive")
    metrics = tuple(v.strip() for v in args.metrics.split(",") if v.strip())
    lags = None if args.lags in (None, "scenario") else parse_lags(args.lags)
    if lags == "auto":
        raise ConfigError("bench takes an explicit lag list or 'scenario'")
    cfg = BenchConfig(scenario=args.scenario, metrics=metrics, m_grid=parse_grid(args.m_grid),
                      T=None if args.scenario == 5 else args.length, trials=args.trials,
                      seed=args.seed, lags=None if lags is None else lags.lags, C=args.clusters,
                      restarts=args.restarts, max_iter=args.max_iter, weighted=args.weighted,
                      cutoff=args.cutoff)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_bench(cfg, threads=_threads(args))
    if args.trials_csv:
        rows = report.trial_rows()
        with open(args.trials_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    _emit_json(report.to_dict(), args.output)
    return EXIT_OK


# ----------------------------------------------------------------------- parser

def _add_series_opts(p, lags=True):
    p.add_argument("-i", "--input", help="series file (.jsonl or .csv) or directory")
    p.add_argument("-o", "--output", help="output path (default: standard output)")
    if lags:
        p.add_argument("--lags", default="1", help="comma list or 'auto' (default: 1)")
        p.add_argument("--alpha", type=float, default=0.05, help="level for --lags auto")
        p.add_argument("--lmax", type=int, default=5, help="largest lag tested by --lags auto")


def _add_metric(p):
    p.add_argument("--metric", choices=METRICS, default="d1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otsclust",
                                     description="Fuzzy clustering of ordinal time series.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap (default: $OTSCLUST_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a scenario data set")
    p.add_argument("--scenario", type=int, required=True)
    p.add_argument("--length", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-cluster", type=int, default=5)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("features", help="per-series estimates")
    _add_series_opts(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("distmat", help="pairwise distance matrix")
    _add_series_opts(p)
    _add_metric(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--component", choices=("total", "marginal", "serial"), default="total")
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("select-lags", help="choose the lag set by kappa tests")
    _add_series_opts(p, lags=False)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--lmax", type=int, default=5)
    p.add_argument("--correction", choices=CORRECTIONS, default="bonferroni")
    p.set_defaults(func=cmd_select_lags)

    p = sub.add_parser("cluster", help="fuzzy C-medoids clustering")
    _add_series_opts(p)
    _add_metric(p)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--fuzziness", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("select-cm", help="choose (C, m) by validity indices")
    _add_series_opts(p)
    _add_metric(p)
    p.add_argument("--c-grid", default="2,3,4")
    p.add_argument("--m-grid", default="1.2:2.0:0.2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.set_defaults(func=cmd_select_cm)

    p = sub.add_parser("evaluate", help="score a partition against labels")
    p.add_argument("--partition", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--cutoff", type=float, default=0.7)
    p.add_argument("--cutoff-always", action="store_true",
                   help="report the cutoff rule even without isolated series")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mds", help="2-D scaling of a distance matrix")
    _add_series_opts(p)
    _add_metric(p)
    p.add_argument("--matrix", help="distance matrix (.json from distmat, or .csv)")
    p.set_defaults(func=cmd_mds)

    p = sub.add_parser("bench", help="Monte-Carlo benchmark over a scenario")
    p.add_argument("--scenario", type=int, required=True)
    p.add_argument("--metrics", default="d1")
    p.add_argument("--m-grid", default="1.2")
    p.add_argument("--length", type=int, default=600)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lags", default="scenario", help="comma list or 'scenario'")
    p.add_argument("--clusters", type=int, default=None)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--cutoff", type=float, default=0.7)
    p.add_argument("--trials-csv", help="write one row per trial and m here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    if getattr(args, "input", "x") is None and args.command not in ("mds",):
        log.error("--input is required")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except FileFormatError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (ZeroDispersion, ZeroVariance, DegenerateDistances, AllCellsDegenerate) as exc:
        log.error("degenerate data: %s", exc)
        return EXIT_DEGENERATE
    except OTSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
