"""
Why the ordering of categories matters
======================================

Three four-state processes whose marginals differ by moving probability mass
between neighbouring or distant categories. A pmf-based distance cannot tell
these moves apart; the cumulative distance can.
"""

import numpy as np

from otsclust.metrics import d1m_via_pmf

# cumulative marginals f_i = P(X <= s_i), i = 0, 1, 2
cum = {
    "A": (0.4, 0.5, 0.6),
    "B": (0.1, 0.5, 0.6),
    "C": (0.1, 0.2, 0.6),
}
pmf = {k: np.diff(np.r_[0.0, v, 1.0]) for k, v in cum.items()}
for k, p in pmf.items():
    print(k, "pmf", np.round(p, 2))

# %%
# Pairwise distances. The pmf distance is the same for every pair, while the
# cumulative one doubles for the pair that is two shifts apart.
for a, b in [("A", "B"), ("B", "C"), ("A", "C")]:
    d_cum = float(np.sum((np.subtract(cum[a], cum[b])) ** 2))
    d_pmf = float(np.sum((pmf[a] - pmf[b]) ** 2))
    print(f"{a}-{b}: cumulative {d_cum:.2f}  via pmf form {d1m_via_pmf(pmf[a], pmf[b]):.2f}"
          f"  pmf {d_pmf:.2f}")
