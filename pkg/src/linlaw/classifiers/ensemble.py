import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import as_generator, check_finite_array, check_int, check_is_fitted, check_X_y
from ..exceptions import DomainError
from .tree import CartTree


class BaggedTrees(ClassifierMixin, BaseEstimator):
    """Bagging ensemble of CART trees with per-tree feature subsets.

    Each tree sees ``ceil(sample_fraction * n)`` rows (drawn with
    replacement when ``bootstrap``, otherwise without) and
    ``ceil(feature_fraction * d)`` features. Prediction is a majority vote
    with ties going to 0.
    """

    def __init__(self, n_trees=30, sample_fraction=1.0, feature_fraction=0.7,
                 max_depth=10, min_leaf=1, bootstrap=True, seed=0):
        self.n_trees = n_trees
        self.sample_fraction = sample_fraction
        self.feature_fraction = feature_fraction
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_int(self.n_trees, "n_trees", min_value=1)
        for name in ("sample_fraction", "feature_fraction"):
            frac = getattr(self, name)
            if not 0.0 < frac <= 1.0:
                raise DomainError(f"{name} must be in (0, 1], got {frac}")
        n, d = X.shape
        n_rows = max(1, int(np.ceil(self.sample_fraction * n)))
        n_feat = max(1, int(np.ceil(self.feature_fraction * d)))
        rng = as_generator(self.seed, "ensemble")
        self.estimators_ = []
        self.features_ = []
        for _ in range(self.n_trees):
            if self.bootstrap:
                rows = rng.integers(0, n, size=n_rows)
            else:
                rows = rng.choice(n, size=n_rows, replace=False)
            feats = np.sort(rng.choice(d, size=n_feat, replace=False))
            tree = CartTree(max_depth=self.max_depth, min_leaf=self.min_leaf)
            tree.fit(X[rows][:, feats], y[rows])
            self.estimators_.append(tree)
            self.features_.append(feats)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = d
        return self

    def predict(self, X):
        check_is_fitted(self, "estimators_")
        X = check_finite_array(X, "X", ndim=2)
        votes = np.zeros(len(X), dtype=np.int64)
        for tree, feats in zip(self.estimators_, self.features_):
            votes += tree.predict(X[:, feats])
        return (2 * votes > len(self.estimators_)).astype(np.int64)
