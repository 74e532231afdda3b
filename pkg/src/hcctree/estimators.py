"""scikit-learn style wrappers around the fitters.

Each estimator takes a precomputed distance matrix as ``X``. The fitted
metric lives on the training points only, so ``transform`` returns it for
an ``X`` of the same size and ``fit_transform`` is the usual entry point.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .baselines import gromov_tree_fit, neighbor_join, single_linkage_ultrametric
from .fitters import best_base_tree_fit, hcc_rooted_tree_fit, hcc_ultra_fit
from .metricspace import check_distance_matrix
from .report import FitReport


class _DistanceFitter(TransformerMixin, BaseEstimator):
    def transform(self, X):
        check_is_fitted(self, "distances_")
        X = check_distance_matrix(X)
        if X.shape != self.distances_.shape:
            raise ValueError(
                f"fitted on {self.distances_.shape[0]} points, got {X.shape[0]}"
            )
        return self.distances_.copy()

    def fit_transform(self, X, y=None):
        return self.fit(X, y).distances_.copy()


class HCCUltrametric(_DistanceFitter):
    """Ultrametric fit by hierarchical correlation clustering.

    Attributes
    ----------
    distances_ : ndarray
        Fitted ultrametric.
    merge_log_ : MergeLog
    report_ : FitReport
    """

    def fit(self, X, y=None):
        X = check_distance_matrix(X)
        self.distances_, self.merge_log_ = hcc_ultra_fit(X)
        self.report_ = FitReport.from_fit("hcc_ultra", X, self.distances_)
        return self


class SingleLinkageUltrametric(_DistanceFitter):
    """Subdominant ultrametric from single linkage."""

    def fit(self, X, y=None):
        X = check_distance_matrix(X)
        self.distances_, self.merge_log_ = single_linkage_ultrametric(X)
        self.report_ = FitReport.from_fit("slhc", X, self.distances_)
        return self


def _pick_root(root, n, random_state):
    if root == "random":
        return int(check_random_state(random_state).randint(n))
    if isinstance(root, (int, np.integer)) and 0 <= root < n:
        return int(root)
    raise ValueError(f"root must be an index in [0, {n}) or 'random', got {root!r}")


class HCCTreeFit(_DistanceFitter):
    """Rooted tree fit that keeps all distances to the root.

    Parameters
    ----------
    root : int, "random" or "best"
        Base point. ``"best"`` tries bases according to ``strategy``.
    strategy : {"min_error", "min_hyp_l1"}
        Base selection rule when ``root="best"``.
    random_state : int, RandomState or None
        Used when ``root="random"``.
    """

    def __init__(self, root=0, strategy="min_error", random_state=None):
        self.root = root
        self.strategy = strategy
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_distance_matrix(X)
        if self.root == "best":
            self.tree_, self.distances_, self.root_, self.report_ = best_base_tree_fit(
                X, self.strategy
            )
        else:
            self.root_ = _pick_root(self.root, X.shape[0], self.random_state)
            self.tree_, self.distances_, self.report_ = hcc_rooted_tree_fit(X, self.root_)
        return self


class GromovTreeFit(_DistanceFitter):
    """Gromov's rooted tree fit (single linkage on Gromov products)."""

    def __init__(self, root=0, random_state=None):
        self.root = root
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_distance_matrix(X)
        self.root_ = _pick_root(self.root, X.shape[0], self.random_state)
        self.tree_, self.distances_, self.report_ = gromov_tree_fit(X, self.root_)
        return self


class NeighborJoining(_DistanceFitter):
    """Unrooted tree fit by neighbor joining."""

    def fit(self, X, y=None):
        X = check_distance_matrix(X)
        self.tree_, self.distances_, self.report_ = neighbor_join(X)
        return self
