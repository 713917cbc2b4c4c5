import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import solve_toeplitz

from otsclust.core import LagTooLarge, validate_series
from otsclust.estimation import (DegenerateSeriesWarning, SingularRecursion, ZeroDispersion,
                                 ZeroVariance, build_repr, count_acf, estimate_cumulative_joint,
                                 estimate_cumulative_marginal, estimate_pmf, marginal_features,
                                 ordinal_kappa, partial_kappas)

series_strategy = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n), min_size=4, max_size=60)))


def _brute_joint(states, n, lag):
    T = len(states)
    F = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            F[i, j] = sum(states[k] <= i and states[k + lag] <= j for k in range(T - lag)) / (T - lag)
    return F


def test_marginal_and_joint_small_example():
    x = validate_series("x", [0, 1, 2, 1, 0, 2], 2)
    np.testing.assert_allclose(estimate_cumulative_marginal(x), [2 / 6, 4 / 6])
    np.testing.assert_allclose(estimate_cumulative_joint(x, 1), _brute_joint(x.states, 2, 1))


@settings(max_examples=60, deadline=None)
@given(series_strategy, st.integers(1, 3))
def test_joint_matches_loop_oracle(data, lag):
    n, states = data
    x = validate_series("x", states, n)
    np.testing.assert_allclose(estimate_cumulative_joint(x, lag), _brute_joint(states, n, lag),
                               atol=1e-15)
    F = estimate_cumulative_joint(x, lag)
    assert np.all(np.diff(F, axis=0) >= -1e-15) and np.all(np.diff(F, axis=1) >= -1e-15)


def test_joint_lag_errors():
    x = validate_series("x", [0, 1, 0], 1)
    with pytest.raises(LagTooLarge):
        estimate_cumulative_joint(x, 3)


def test_pmf_joint_sums_to_one():
    x = validate_series("x", [0, 2, 1, 1, 2, 0, 0], 2)
    p, (P1, P2) = estimate_pmf(x, (1, 2))
    assert p.sum() == pytest.approx(1.0)
    assert P1.sum() == pytest.approx(1.0) and P2.sum() == pytest.approx(1.0)
    # the pmf of the joint reconstructs the cumulative joint
    np.testing.assert_allclose(np.cumsum(np.cumsum(P1, 0), 1)[:-1, :-1],
                               estimate_cumulative_joint(x, 1))


def _features_by_expectation(pmf):
    """Block-distance expectations computed directly from a pmf."""
    n = len(pmf) - 1
    k = np.arange(n + 1)
    loc = float(np.sum(pmf * k))
    disp = float(sum(pmf[a] * pmf[b] * abs(a - b) for a, b in itertools.product(k, k)))
    skew = float(np.sum(pmf * np.abs(k - n)) - np.sum(pmf * k))
    reflected = pmf[::-1]
    surv = lambda q: 1.0 - np.cumsum(q)[:-1]
    asym = float(np.sum((surv(pmf) - surv(reflected)) ** 2))
    return loc, disp, asym, skew


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.lists(
    st.floats(0.0, 1.0, allow_nan=False), min_size=n + 1, max_size=n + 1)))
def test_features_match_expectation_oracle(weights):
    w = np.asarray(weights)
    if w.sum() == 0:
        w = np.ones_like(w)
    pmf = w / w.sum()
    f = np.cumsum(pmf)[:-1]
    np.testing.assert_allclose(marginal_features(f), _features_by_expectation(pmf), atol=1e-12)


def test_symmetric_pmf_has_zero_skew_and_asymmetry():
    pmf = np.array([0.1, 0.2, 0.4, 0.2, 0.1])
    loc, disp, asym, skew = marginal_features(np.cumsum(pmf)[:-1])
    assert loc == pytest.approx(2.0)
    assert skew == pytest.approx(0.0, abs=1e-15)
    assert asym == pytest.approx(0.0, abs=1e-15)


def test_point_masses_at_the_ends():
    n = 4
    bottom = marginal_features(np.ones(n))
    top = marginal_features(np.zeros(n))
    assert bottom[3] == pytest.approx(n) and top[3] == pytest.approx(-n)
    assert bottom[1] == 0.0 and top[1] == 0.0


def test_kappa_perfect_persistence_and_alternation():
    persist = validate_series("p", [0] * 50 + [1] * 50, 1)
    assert ordinal_kappa(persist, 1) == pytest.approx(1.0, abs=0.05)
    alt = validate_series("a", [0, 1] * 50, 1)
    assert ordinal_kappa(alt, 1) == pytest.approx(-1.0, abs=0.05)
    with pytest.raises(ZeroDispersion):
        ordinal_kappa(validate_series("c", [1, 1, 1], 2), 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-0.45, 0.45), min_size=1, max_size=6))
def test_partial_kappas_match_toeplitz_solve(rho):
    rho = np.asarray(rho)
    R = np.r_[1.0, rho]
    # only positive-definite sequences correspond to valid autocorrelations
    mats = [np.array([[R[abs(i - j)] for j in range(k)] for i in range(k)]) for k in range(1, len(R) + 1)]
    if any(np.linalg.eigvalsh(M).min() < 1e-6 for M in mats):
        return
    got = partial_kappas(rho)
    oracle = [solve_toeplitz(R[:k], rho[:k])[-1] for k in range(1, len(rho) + 1)]
    np.testing.assert_allclose(got, oracle, atol=1e-10)


def test_partial_kappas_ar1_cuts_off():
    phi = 0.6
    got = partial_kappas(phi ** np.arange(1, 6))
    np.testing.assert_allclose(got, [phi, 0, 0, 0, 0], atol=1e-12)


def test_partial_kappas_singular():
    with pytest.raises(SingularRecursion):
        partial_kappas([1.0, 0.5])


def test_count_acf_matches_numpy():
    rng = np.random.default_rng(1)
    s = rng.integers(0, 4, size=200)
    x = validate_series("x", s, 3)
    c = s - s.mean()
    for lag in (0, 1, 3):
        expect = 1.0 if lag == 0 else np.dot(c[:-lag], c[lag:]) / np.dot(c, c)
        assert count_acf(x, lag) == pytest.approx(expect, abs=1e-14)
    with pytest.raises(ZeroVariance):
        count_acf(validate_series("c", [2, 2, 2], 3), 1)


def test_build_repr_constant_series_is_flagged():
    x = validate_series("c", [1] * 10, 3)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = build_repr(x, (1, 2))
    assert r.degenerate
    assert any(issubclass(w.category, DegenerateSeriesWarning) for w in caught)
    assert r.kappa_vector.tolist() == [0.0, 0.0] and r.acf.tolist() == [0.0, 0.0]


def test_build_repr_arrays_read_only():
    r = build_repr(validate_series("x", [0, 1, 2, 1], 2), (1,))
    with pytest.raises(ValueError):
        r.f[0] = 0.5
