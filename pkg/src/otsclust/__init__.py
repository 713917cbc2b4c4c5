"""Fuzzy clustering of ordinal time series."""

from .core import (LagSet, OrdinalRange, OrdinalSeries, OTSError, as_lagset,
                   encode_labels, validate_series)
from .estimation import (build_repr, build_reprs, count_acf, estimate_cumulative_joint,
                         estimate_cumulative_marginal, estimate_pmf, marginal_features,
                         ordinal_kappa, partial_kappas)
from .metrics import DistanceMatrix, distance, pairwise_matrix
from .clustering import (ClusterConfig, FuzzyPartition, cluster_matrix, fuzzy_cmedoids,
                         weighted_fuzzy_cmedoids)
from .lagsel import LagSelectionConfig, select_lags
from .evaluation import (arif, aufc, correct_classification, jif, mds_2d, select_c_m,
                         validity_indices)
from .simgen import scenario

__version__ = "0.1.0"

__all__ = [
    "LagSet", "OrdinalRange", "OrdinalSeries", "OTSError", "as_lagset", "encode_labels",
    "validate_series", "build_repr", "build_reprs", "count_acf", "estimate_cumulative_joint",
    "estimate_cumulative_marginal", "estimate_pmf", "marginal_features", "ordinal_kappa",
    "partial_kappas", "DistanceMatrix", "distance", "pairwise_matrix", "ClusterConfig",
    "FuzzyPartition", "cluster_matrix", "fuzzy_cmedoids", "weighted_fuzzy_cmedoids",
    "LagSelectionConfig", "select_lags", "arif", "aufc", "correct_classification", "jif",
    "mds_2d", "select_c_m", "validity_indices", "scenario",
]
