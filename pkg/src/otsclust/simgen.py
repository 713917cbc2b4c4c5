"""Seeded simulators for ordinal count processes and the benchmark scenarios.

Three families are covered:

* binomial AR(p): ``C_t = alpha o C_{t-i} + beta o (n - C_{t-i})`` with the lag
  ``i`` drawn from ``Mult(1; phi)``,
* binomial INARCH(p): ``C_t | past ~ Bin(n, beta + sum_i alpha_i C_{t-i} / n)``,
* ordinal logit AR(1): ``C_t = j`` iff ``Q_t - alpha[C_{t-1}] in [eta_{j-1}, eta_j)``
  with standard logistic ``Q_t`` (``alpha`` acts on the reduced binarization of
  the previous state, so the top state contributes 0).

All draws use inversion of exact conditional CDFs fed by uniforms from a
numpy ``Generator``; a fixed ``(params, T, seed)`` reproduces the same series.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import OrdinalRange, OrdinalSeries, OTSError

BURN_IN = 500
NONE_LABEL = "none"


class InvalidParams(OTSError):
    pass


class UnknownScenario(OTSError):
    pass


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def series_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for series ``index`` of a data set seeded by ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def binomial_pmf(y: int, a: float) -> np.ndarray:
    k = np.arange(y + 1)
    comb = np.array([math.comb(y, int(i)) for i in k], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        pmf = comb * np.power(a, k) * np.power(1.0 - a, y - k)
    return np.nan_to_num(pmf)


def _invert(cdf: np.ndarray, u: float) -> int:
    # smallest k with u < cdf[k]; the last bin absorbs rounding
    k = int(np.searchsorted(cdf, u, side="right"))
    return min(k, cdf.shape[0] - 1)


def binomial_thinning(y: int, a: float, rng) -> int:
    """Draw ``a o y ~ Bin(y, a)`` by inversion."""
    if y < 0 or not 0.0 <= a <= 1.0:
        raise InvalidParams("thinning needs y >= 0 and a in [0, 1]")
    if y == 0:
        return 0
    if a == 1.0:
        return int(y)
    return _invert(np.cumsum(binomial_pmf(int(y), a)), _rng(rng).random())


@dataclass(frozen=True)
class BinomialArParams:
    n: int
    alpha: float
    beta: float
    phi: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        if self.n < 1:
            raise InvalidParams("n must be >= 1")
        if not (0.0 < self.alpha < 1.0 and 0.0 < self.beta < 1.0):
            raise InvalidParams("alpha and beta must lie in (0, 1)")
        if not self.phi or any(v < 0 for v in self.phi) or abs(sum(self.phi) - 1.0) > 1e-12:
            raise InvalidParams("phi must be non-negative weights summing to 1")

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def rho(self) -> float:
        return self.alpha - self.beta

    @property
    def pi(self) -> float:
        """Stationary success probability ``beta / (1 - (alpha - beta))``."""
        return self.beta / (1.0 - self.rho)

    def transition_cdf(self) -> np.ndarray:
        """Row ``y``: CDF of ``Bin(y, alpha) + Bin(n - y, beta)``."""
        n = self.n
        rows = np.empty((n + 1, n + 1))
        for y in range(n + 1):
            rows[y] = np.cumsum(np.convolve(binomial_pmf(y, self.alpha),
                                            binomial_pmf(n - y, self.beta)))
        return rows


@dataclass(frozen=True)
class BinomialInarchParams:
    n: int
    alphas: tuple
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.n < 1:
            raise InvalidParams("n must be >= 1")
        if not self.alphas:
            raise InvalidParams("at least one alpha is required")
        top = self.beta + sum(self.alphas)
        if not (0.0 < self.beta < 1.0 and 0.0 < top < 1.0):
            raise InvalidParams("need beta and beta + sum(alphas) in (0, 1)")
        if any(a < 0 for a in self.alphas):
            raise InvalidParams("alphas must be non-negative")

    @property
    def p(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class OrdinalLogitParams:
    n: int
    alpha: tuple
    eta: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "eta", tuple(float(e) for e in self.eta))
        if self.n < 1:
            raise InvalidParams("n must be >= 1")
        if len(self.alpha) != self.n or len(self.eta) != self.n:
            raise InvalidParams("alpha and eta need n entries each")
        if any(b <= a for a, b in zip(self.eta, self.eta[1:])):
            raise InvalidParams("eta must be strictly increasing")

    def transition_cdf(self) -> np.ndarray:
        """Row ``k``: ``P(C_t <= j | C_{t-1} = k) = logistic(eta_j + alpha_k)``."""
        shift = np.append(self.alpha, 0.0)
        eta = np.asarray(self.eta)
        cdf = 1.0 / (1.0 + np.exp(-(eta[None, :] + shift[:, None])))
        return np.hstack([cdf, np.ones((self.n + 1, 1))])


def _make_series(states, n: int, id: str) -> OrdinalSeries:
    return OrdinalSeries(str(id), OrdinalRange(n), np.asarray(states, dtype=np.int64))


def simulate_binomial_ar(params: BinomialArParams, T: int, rng=None,
                         id: str = "bar", burn_in: int = BURN_IN) -> OrdinalSeries:
    if T <= params.p:
        raise InvalidParams(f"need T > p = {params.p}")
    rng = _rng(rng)
    n, p = params.n, params.p
    total = T + burn_in
    trans = params.transition_cdf()
    init_cdf = np.cumsum(binomial_pmf(n, params.pi))
    u0 = rng.random(p)
    u = rng.random(total)
    if p > 1:
        lag_pick = np.searchsorted(np.cumsum(params.phi)[:-1], rng.random(total), side="right") + 1
    else:
        lag_pick = np.ones(total, dtype=np.int64)
    xs = [_invert(init_cdf, u0[k]) for k in range(p)]
    rows = [list(trans[y]) for y in range(n + 1)]
    picks = lag_pick.tolist()
    for t, ut in enumerate(u.tolist()):
        k = bisect_right(rows[xs[-picks[t]]], ut)
        xs.append(k if k <= n else n)
    return _make_series(xs[p + burn_in:], n, id)


def simulate_binomial_inarch(params: BinomialInarchParams, T: int, rng=None,
                             id: str = "inarch", burn_in: int = BURN_IN) -> OrdinalSeries:
    rng = _rng(rng)
    n, p = params.n, params.p
    alphas = np.asarray(params.alphas)
    total = T + burn_in
    u = rng.random(total)
    xs = [0] * p
    cache = {}
    for ut in u.tolist():
        hist = tuple(xs[-1:-p - 1:-1])  # (C_{t-1}, ..., C_{t-p})
        cdf = cache.get(hist)
        if cdf is None:
            prob = params.beta + float(np.dot(alphas, hist)) / n
            if not 0.0 <= prob <= 1.0:
                raise AssertionError(f"success probability {prob} outside [0, 1]")
            cdf = list(np.cumsum(binomial_pmf(n, prob)))
            cache[hist] = cdf
        k = bisect_right(cdf, ut)
        xs.append(k if k <= n else n)
    return _make_series(xs[p + burn_in:], n, id)


def simulate_ordinal_logit_ar1(params: OrdinalLogitParams, T: int, rng=None,
                               id: str = "logit", burn_in: int = BURN_IN) -> OrdinalSeries:
    rng = _rng(rng)
    n = params.n
    total = T + burn_in
    trans = params.transition_cdf()
    rows = [list(r) for r in trans]
    u = rng.random(total + 1)
    # first state from the model with a zero regression term
    eta = np.asarray(params.eta)
    first = list(np.append(1.0 / (1.0 + np.exp(-eta)), 1.0))
    us = u.tolist()
    k = bisect_right(first, us[0])
    prev = k if k <= n else n
    xs = [prev]
    for ut in us[1:]:
        k = bisect_right(rows[prev], ut)
        prev = k if k <= n else n
        xs.append(prev)
    return _make_series(xs[1 + burn_in:], n, id)


def simulate(params, T: int, rng=None, id: str = "x") -> OrdinalSeries:
    if isinstance(params, BinomialArParams):
        return simulate_binomial_ar(params, T, rng, id)
    if isinstance(params, BinomialInarchParams):
        return simulate_binomial_inarch(params, T, rng, id)
    if isinstance(params, OrdinalLogitParams):
        return simulate_ordinal_logit_ar1(params, T, rng, id)
    raise InvalidParams(f"unsupported parameter type {type(params).__name__}")


# --------------------------------------------------------------------------
# scenario catalogue

LOGIT_ETA = (-2.0, -1.0, 0.0, 1.0, 2.0)


def _bar(n, a, b, phi=(1.0,)):
    return BinomialArParams(n, a, b, phi)


def _inarch(n, alphas, b):
    return BinomialInarchParams(n, alphas, b)


def _logit(n, alpha5, eta5=LOGIT_ETA):
    """Logit AR(1) with the 6-state coefficients stretched to ``n`` thresholds."""
    if n == len(alpha5):
        return OrdinalLogitParams(n, alpha5, eta5)
    grid5 = np.linspace(0.0, 1.0, len(alpha5))
    grid = np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.5])
    alpha = np.interp(grid, grid5, alpha5)
    eta = np.interp(grid, grid5, eta5) if n > 1 else np.array([0.0])
    return OrdinalLogitParams(n, tuple(alpha), tuple(eta))


def _groups_fixed(scenario: int, n: int = 5) -> list:
    if scenario == 1:
        return [_bar(n, 0.70, 0.20), _bar(n, 0.72, 0.12),
                _bar(n, 0.76, 0.06, (0.5, 0.5)), _bar(n, 0.91, 0.01, (0.5, 0.5))]
    if scenario == 2:
        return [_inarch(n, (0.30,), 0.35), _inarch(n, (0.30,), 0.40),
                _inarch(n, (0.1, 0.1), 0.2), _inarch(n, (0.1, 0.1), 0.4)]
    if scenario == 3:
        return [_logit(n, (0.4, -0.8, 1.2, 1.6, 2.0)), _logit(n, (0.6, -1.2, 1.8, 2.4, 3.0)),
                _logit(n, (0.8, -1.6, 2.4, 3.2, 4.0)), _logit(n, (1.0, -2.0, 3.0, 4.0, 5.0))]
    if scenario in (4, 5):
        return [_bar(n, 0.70, 0.20), _bar(n, 0.72, 0.12),
                _logit(n, (1.0, -2.0, 3.0, 4.0, 5.0)),
                _inarch(n, (0.1, 0.3, 0.2), 0.2), _inarch(n, (0.1, 0.2, 0.3), 0.2),
                _inarch(n, (0.1, 0.25, 0.25), 0.2)]
    if scenario == 6:
        return [_bar(n, 0.52, 0.12), _bar(n, 0.42, 0.07, (0.1, 0.9))]
    if scenario == 7:
        return [_inarch(n, (0.1, 0.1), 0.1), _inarch(n, (0.5, 0.1), 0.1)]
    raise UnknownScenario(f"unknown scenario {scenario!r}; expected 1..7")


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of one simulated data set."""

    scenario: int
    n: int
    groups: tuple
    sizes: tuple
    lengths: tuple
    isolated: Optional[object] = None
    lags: tuple = (1, 2)
    C: int = 4

    @property
    def s(self) -> int:
        return sum(self.sizes) + (1 if self.isolated is not None else 0)


SCENARIO_LAGS = {1: (1, 2), 2: (1, 2), 3: (1,), 4: (1, 2, 3), 5: (1, 2, 3), 6: (1, 2), 7: (1, 2)}
SCENARIO_CLUSTERS = {1: 4, 2: 4, 3: 4, 4: 6, 5: 6, 6: 2, 7: 2}


def scenario_spec(scenario: int, T=600, seed: int = 0, per_cluster: int = 5) -> ScenarioSpec:
    """Generating design of a scenario; Scenario 5 draws its design from ``seed``."""
    if scenario not in SCENARIO_LAGS:
        raise UnknownScenario(f"unknown scenario {scenario!r}; expected 1..7")
    if scenario == 5:
        design = series_rng(seed, 10 ** 9)
        n = int(design.integers(1, 11))
        groups = _groups_fixed(5, n)
        sizes = tuple(int(v) for v in design.integers(2, 11, size=len(groups)))
        lengths = tuple(int(v) * 100 for v in design.integers(1, 6, size=sum(sizes)))
        return ScenarioSpec(5, n, tuple(groups), sizes, lengths, None,
                            SCENARIO_LAGS[5], SCENARIO_CLUSTERS[5])
    if T is None or T == "variable":
        raise OTSError(f"scenario {scenario} needs an integer length T")
    T = int(T)
    groups = _groups_fixed(scenario)
    sizes = (per_cluster,) * len(groups)
    isolated = None
    if scenario in (6, 7):
        isolated = OrdinalLogitParams(5, (0.5, -1.0, 1.5, 2.0, 2.5), LOGIT_ETA)
    s = sum(sizes) + (1 if isolated is not None else 0)
    return ScenarioSpec(scenario, 5, tuple(groups), sizes, (T,) * s, isolated,
                        SCENARIO_LAGS[scenario], SCENARIO_CLUSTERS[scenario])


@dataclass(eq=False)
class LabeledDataset:
    series: list
    labels: list
    spec: ScenarioSpec
    seed: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def ids(self) -> list:
        return [x.id for x in self.series]

    def label_map(self) -> dict:
        return dict(zip(self.ids, self.labels))


def scenario(scenario_id: int, T=600, seed: int = 0, per_cluster: int = 5) -> LabeledDataset:
    """Simulate one labelled data set of the given scenario.

    Cluster labels are ``"1"``, ``"2"``, ...; an isolated series is labelled
    ``"none"``. Series ``k`` uses the stream ``series_rng(seed, k)``.
    """
    spec = scenario_spec(scenario_id, T, seed, per_cluster)
    series, labels = [], []
    k = 0
    for g, (params, size) in enumerate(zip(spec.groups, spec.sizes), start=1):
        for _ in range(size):
            sid = f"s{k + 1:03d}"
            series.append(simulate(params, spec.lengths[k], series_rng(seed, k), sid))
            labels.append(str(g))
            k += 1
    if spec.isolated is not None:
        sid = f"s{k + 1:03d}"
        series.append(simulate(spec.isolated, spec.lengths[k], series_rng(seed, k), sid))
        labels.append(NONE_LABEL)
    return LabeledDataset(series, labels, spec, seed)


def iid_dataset(s: int, T: int, n: int = 5, seed: int = 0, probs: Optional[Sequence] = None):
    """Serially independent series with categorical marginal ``probs`` (uniform by default)."""
    probs = np.full(n + 1, 1.0 / (n + 1)) if probs is None else np.asarray(probs, float)
    out = []
    for k in range(s):
        rng = series_rng(seed, k)
        out.append(_make_series(rng.choice(n + 1, size=T, p=probs), n, f"s{k + 1:03d}"))
    return out
