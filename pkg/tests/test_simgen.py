import numpy as np
import pytest
from scipy.special import expit
from scipy.stats import binom

from otsclust.simgen import (BinomialArParams, BinomialInarchParams, InvalidParams,
                             OrdinalLogitParams, UnknownScenario, binomial_thinning,
                             iid_dataset, scenario, simulate, simulate_binomial_ar,
                             simulate_binomial_inarch, simulate_ordinal_logit_ar1)
from otsclust.estimation import count_acf


def test_thinning_distribution():
    rng = np.random.default_rng(0)
    draws = np.array([binomial_thinning(6, 0.3, rng) for _ in range(20_000)])
    emp = np.bincount(draws, minlength=7) / draws.size
    np.testing.assert_allclose(emp, binom.pmf(np.arange(7), 6, 0.3), atol=0.01)
    assert binomial_thinning(0, 0.5, rng) == 0
    assert binomial_thinning(4, 1.0, rng) == 4


def test_binomial_ar_stationary_marginal():
    # stationary marginal is Bin(n, pi) with pi = beta / (1 - alpha + beta)
    p = BinomialArParams(4, 0.6, 0.2)
    x = simulate_binomial_ar(p, 60_000, rng=1)
    pi = 0.2 / (1 - 0.6 + 0.2)
    emp = np.bincount(x.states, minlength=5) / x.T
    np.testing.assert_allclose(emp, binom.pmf(np.arange(5), 4, pi), atol=0.01)
    assert count_acf(x, 1) == pytest.approx(0.4, abs=0.02)


def test_inarch_two_state_chain_stationary_law():
    # n = 2, p = 1: an exact 3-state Markov chain with rows Bin(2, beta + alpha * c / 2)
    alpha, beta, n = 0.5, 0.2, 2
    P = np.array([binom.pmf(np.arange(3), n, beta + alpha * c / n) for c in range(3)])
    w, v = np.linalg.eig(P.T)
    stat = np.real(v[:, np.argmin(np.abs(w - 1))])
    stat /= stat.sum()
    x = simulate_binomial_inarch(BinomialInarchParams(n, (alpha,), beta), 80_000, rng=2)
    np.testing.assert_allclose(np.bincount(x.states, minlength=3) / x.T, stat, atol=0.01)


def test_logit_transition_probabilities():
    p = OrdinalLogitParams(2, (1.0, -0.5), (-0.5, 0.7))
    x = simulate_ordinal_logit_ar1(p, 80_000, rng=3)
    s = x.states
    for k in range(3):
        nxt = s[1:][s[:-1] == k]
        alpha_k = (1.0, -0.5, 0.0)[k]
        # P(C_t <= j | C_{t-1} = k) = logistic(eta_j + alpha_k)
        expect = expit(np.array([-0.5, 0.7]) + alpha_k)
        emp = np.array([np.mean(nxt <= j) for j in range(2)])
        np.testing.assert_allclose(emp, expect, atol=0.015)


def test_determinism_and_independent_streams():
    a = scenario(2, 300, seed=11)
    b = scenario(2, 300, seed=11)
    assert all(x == y for x, y in zip(a.series, b.series))
    c = scenario(2, 300, seed=12)
    assert any(x != y for x, y in zip(a.series, c.series))
    assert not np.array_equal(a.series[0].states, a.series[1].states)


@pytest.mark.parametrize("sid,size,C", [(1, 20, 4), (2, 20, 4), (3, 20, 4), (4, 30, 6),
                                        (6, 11, 2), (7, 11, 2)])
def test_scenario_shapes(sid, size, C):
    d = scenario(sid, 150, seed=0)
    assert len(d.series) == size and d.spec.C == C
    assert all(x.T == 150 and x.n == 5 for x in d.series)
    assert len(set(d.labels) - {"none"}) == C
    assert ("none" in d.labels) == (sid in (6, 7))


def test_scenario5_random_design():
    d = scenario(5, seed=4)
    spec = d.spec
    assert 1 <= spec.n <= 10
    assert all(2 <= k <= 10 for k in spec.sizes)
    assert {x.T for x in d.series} <= {100, 200, 300, 400, 500}
    assert all(x.n == spec.n for x in d.series)


def test_errors():
    with pytest.raises(UnknownScenario):
        scenario(9)
    with pytest.raises(InvalidParams):
        BinomialArParams(5, 0.2, 1.5)
    with pytest.raises(InvalidParams):
        BinomialInarchParams(5, (0.6, 0.5), 0.2)
    with pytest.raises(InvalidParams):
        OrdinalLogitParams(2, (0.0, 0.0), (1.0, 0.0))
    with pytest.raises(InvalidParams):
        simulate(object(), 10)


def test_iid_dataset():
    data = iid_dataset(3, 500, n=2, seed=0)
    assert len(data) == 3 and data[0].n == 2
    assert abs(count_acf(data[0], 1)) < 0.15
