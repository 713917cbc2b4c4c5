"""Acceptance criteria, one test each; a PASS/FAIL table is printed at the end of the run."""

import itertools
import time
import warnings

import numpy as np

from otsclust.bench import BenchConfig, m_grid, run_bench
from otsclust.clustering import ClusterConfig, fuzzy_cmedoids, weighted_fuzzy_cmedoids
from otsclust.core import validate_series
from otsclust.estimation import build_repr, count_acf
from otsclust.evaluation import arif_value, hard_memberships, jif_value, mds_2d
from otsclust.lagsel import select_lags
from otsclust.metrics import d1_components, d1m_via_pmf, d_pmf_components, pairwise_matrix
from otsclust.simgen import BinomialArParams, iid_dataset, scenario, simulate_binomial_ar


def _repr_from_cumulative(f, id):
    # a short series whose empirical cumulative marginal equals f exactly (T = 10)
    f = np.asarray(f)
    pmf = np.diff(np.concatenate([[0.0], f, [1.0]]))
    counts = np.rint(pmf * 10).astype(int)
    states = np.repeat(np.arange(len(counts)), counts)
    return build_repr(validate_series(id, states, len(f)), (1,))


def test_1_toy_exactness(record_acceptance):
    t0 = time.perf_counter()
    r = [_repr_from_cumulative(f, f"p{k}") for k, f in
         enumerate([(0.4, 0.5, 0.6), (0.1, 0.5, 0.6), (0.1, 0.2, 0.6)], start=1)]
    d = {(i, j): d1_components(r[i], r[j]).marginal for i, j in [(0, 1), (1, 2), (0, 2)]}
    pmf = [d_pmf_components(r[i], r[j]).marginal for i, j in [(0, 1), (1, 2), (0, 2)]]
    err = max(abs(d[(0, 1)] - 0.09), abs(d[(1, 2)] - 0.09), abs(d[(0, 2)] - 0.18),
              *(abs(v - 0.18) for v in pmf))
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-12 and elapsed < 1.0
    record_acceptance(1, "toy cumulative vs pmf distances", ok,
                      f"max abs error {err:.1e} (tol 1e-12), {elapsed:.3f}s")
    assert ok


def test_2_cumulative_vs_pmf_form(record_acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 11))
        p, q = rng.dirichlet(np.ones(n + 1)), rng.dirichlet(np.ones(n + 1))
        cum = float(np.sum((np.cumsum(p)[:-1] - np.cumsum(q)[:-1]) ** 2))
        worst = max(worst, abs(cum - d1m_via_pmf(p, q)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 5.0
    record_acceptance(2, "cumulative vs pmf form on 1000 pmf pairs", ok,
                      f"max abs diff {worst:.1e} (tol 1e-12), {elapsed:.2f}s")
    assert ok


def test_3_solver_contracts(record_acceptance):
    rng = np.random.default_rng(3)
    row_err = 0.0
    mono_ok = True
    beta_ok = True
    frozen_err = 0.0
    for k in range(100):
        X = rng.normal(size=(20, 3))
        DM = np.sum((X[:, None] - X[None]) ** 2, axis=-1)
        Y = rng.normal(size=(20, 2))
        DB = np.sum((Y[:, None] - Y[None]) ** 2, axis=-1)
        cfg = ClusterConfig(C=3, m=1.5, seed=k)
        p1 = fuzzy_cmedoids(DM, cfg)
        p2 = weighted_fuzzy_cmedoids(DM, DB, cfg)
        for p in (p1, p2):
            row_err = max(row_err, float(np.max(np.abs(p.U.sum(axis=1) - 1))),
                          float(-min(p.U.min(), 0.0)))
            mono_ok &= all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(p.history, p.history[1:]))
        beta_ok &= 0.0 <= p2.beta <= 1.0
        # matched components (DM split in halves) with beta frozen at 1/2: beta^2 = (1-beta)^2
        half = ClusterConfig(C=3, m=1.5, seed=k, initial_beta=0.5)
        pw = weighted_fuzzy_cmedoids(DM / 2, DM / 2, half, freeze_beta=True)
        pu = fuzzy_cmedoids(DM / 4, half)
        frozen_err = max(frozen_err, float(np.max(np.abs(pw.U - pu.U))))
    ok = row_err <= 1e-9 and mono_ok and beta_ok and frozen_err <= 1e-12
    record_acceptance(3, "solver contracts on 100 random 20x20 matrices", ok,
                      f"row err {row_err:.1e}, monotone={mono_ok}, beta in [0,1]={beta_ok}, "
                      f"frozen-weight diff {frozen_err:.1e}")
    assert ok


def test_4_scenario1_reproduction(record_acceptance):
    t0 = time.perf_counter()
    rep = run_bench(BenchConfig(1, ("d1",), (1.2, 2.0), 600, 50, seed=0, lags=(1, 2), restarts=5))
    a12, a20 = rep.mean("d1", 1.2), rep.mean("d1", 2.0)
    elapsed = time.perf_counter() - t0
    ok = 0.84 <= a12 <= 1.0 and a20 < a12 and elapsed < 300
    record_acceptance(4, "Scenario-1 mean ARIF (d1, m=1.2, T=600, 50 trials)", ok,
                      f"ARIF(1.2)={a12:.3f} in [0.84,1], ARIF(2.0)={a20:.3f} lower, {elapsed:.1f}s")
    assert ok


def test_5_scenario2_ordering(record_acceptance):
    rep = run_bench(BenchConfig(2, ("d1", "d2", "acf"), (1.4,), 600, 50, seed=0, restarts=5))
    a1, a2, aa = rep.mean("d1", 1.4), rep.mean("d2", 1.4), rep.mean("acf", 1.4)
    ok = a1 - aa >= 0.15 and a2 - aa >= 0.15
    record_acceptance(5, "Scenario-2 ARIF ordering (m=1.4, 50 trials)", ok,
                      f"d1={a1:.3f}, d2={a2:.3f}, acf={aa:.3f} (margin >= 0.15)")
    assert ok


def test_6_scenario6_fuzziness_curve(record_acceptance):
    grid = m_grid(1.05, 4.0, 0.05)
    rep = run_bench(BenchConfig(6, ("d1", "acf"), grid, 600, 50, seed=0, restarts=5, cutoff=0.7))
    summ = {e["metric"]: e for e in rep.summary}
    mx = summ["d1"]["max_rate"]
    a1, aa = summ["d1"]["aufc"], summ["acf"]["aufc"]
    ok = mx >= 0.90 and a1 > aa
    record_acceptance(6, "Scenario-6 fuzziness curve (cutoff 0.7)", ok,
                      f"max rate d1={mx:.2f} (>= 0.90), AUFC d1={a1:.3f} > acf={aa:.3f}")
    assert ok


def test_7_lag_selection(record_acceptance):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        hits = sum(select_lags(scenario(3, 600, k).series).lagset.lags == (1,)
                   for k in range(200))
        rejections = sum(not select_lags(iid_dataset(20, 600, seed=k)).fallback
                         for k in range(200))
    rate, size = hits / 200, rejections / 200
    ok = rate >= 0.90 and size <= 0.05 + 0.03
    record_acceptance(7, "lag selection (Scenario 3, 200 trials; i.i.d. null)", ok,
                      f"lag set {{1}} rate {rate:.3f} (>= 0.90), null rejection {size:.3f} (<= 0.08)")
    assert ok


def test_8_generator_moments(record_acceptance):
    x = simulate_binomial_ar(BinomialArParams(5, 0.70, 0.20), 100_000, rng=8)
    mean = float(x.states.mean())
    acf1 = count_acf(x, 1)
    ok = abs(mean - 2.0) <= 0.05 and abs(acf1 - 0.5) <= 0.03
    record_acceptance(8, "binomial AR(1) moments, T=1e5", ok,
                      f"mean {mean:.4f} (2 +- 0.05), lag-1 ACF {acf1:.4f} (0.5 +- 0.03)")
    assert ok


def test_9_mds(record_acceptance):
    rng = np.random.default_rng(9)
    worst_stress = 0.0
    for _ in range(10):
        P = rng.normal(size=(8, 2))
        D = np.sqrt(np.sum((P[:, None] - P[None]) ** 2, axis=-1))
        worst_stress = max(worst_stress, mds_2d(D).stress)
    r2 = []
    for k in range(10):
        data = scenario(1, 600, k)
        for metric in ("d1", "d2"):
            r2.append(mds_2d(pairwise_matrix(data.series, metric, (1, 2))).r2)
    ok = worst_stress < 1e-6 and min(r2) >= 0.85
    record_acceptance(9, "2-D scaling (exact configs; Scenario-1 R^2)", ok,
                      f"max stress {worst_stress:.1e} (< 1e-6), min R^2 {min(r2):.3f} (>= 0.85)")
    assert ok


def _set_partitions(s, kmax):
    # restricted growth strings
    def rec(prefix, used):
        if len(prefix) == s:
            yield tuple(prefix)
            return
        for v in range(min(used + 1, kmax)):
            yield from rec(prefix + [v], max(used, v + 1))
    yield from rec([0], 1)


def _classic(a_lab, b_lab):
    """Contingency-table ARI (Hubert-Arabie) and pair-count Jaccard; ``None`` when undefined."""
    table = np.zeros((max(a_lab) + 1, max(b_lab) + 1), dtype=int)
    for i, j in zip(a_lab, b_lab):
        table[i, j] += 1
    c2 = lambda v: v * (v - 1) / 2
    idx = float(np.sum(c2(table)))
    ra, rb = float(np.sum(c2(table.sum(axis=1)))), float(np.sum(c2(table.sum(axis=0))))
    expected = ra * rb / c2(len(a_lab))
    top = (ra + rb) / 2
    ari = None if top == expected else (idx - expected) / (top - expected)
    union = ra + rb - idx
    jac = None if union == 0 else idx / union
    return ari, jac


def test_10_arif_jif_reduce_to_classical(record_acceptance):
    worst = 0.0
    count = 0
    for s in range(2, 7):
        parts = list(_set_partitions(s, 3))
        for ref, other in itertools.product(parts, parts):
            ari, jac = _classic(ref, other)
            U = hard_memberships(other)
            got_a, got_j = arif_value(ref, U), jif_value(ref, U)
            # undefined classical values must come back flagged as degenerate
            worst = max(worst, got_a.degenerate != (ari is None), got_j.degenerate != (jac is None))
            if ari is not None:
                worst = max(worst, abs(got_a.value - ari))
            if jac is not None:
                worst = max(worst, abs(got_j.value - jac))
            count += 1
    ok = worst <= 1e-12
    record_acceptance(10, "ARIF/JIF vs classical ARI/Jaccard on hard partitions", ok,
                      f"{count} pairs, max abs diff {worst:.1e} (tol 1e-12)")
    assert ok
