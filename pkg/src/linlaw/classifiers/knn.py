import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_finite_array, check_int, check_is_fitted, check_X_y
from ..exceptions import DomainError
from ._scaling import fit_standardizer

_CHUNK_FLOATS = 2**24


class KNeighborsVote(ClassifierMixin, BaseEstimator):
    """Brute-force k-nearest-neighbour classifier with Euclidean distance.

    Vote ties go to the label of the single nearest neighbour; distance ties
    go to the lower training row index. With ``weighting="distance"``
    neighbours at distance zero, if any, take the whole vote.
    """

    def __init__(self, k=5, weighting="uniform", standardize=True):
        self.k = k
        self.weighting = weighting
        self.standardize = standardize

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_int(self.k, "k", min_value=1)
        if self.weighting not in ("uniform", "distance"):
            raise DomainError(f"weighting must be 'uniform' or 'distance', got {self.weighting!r}")
        if self.k > len(X):
            raise DomainError(f"k={self.k} exceeds the {len(X)} training rows")
        self.scaler_ = fit_standardizer(X) if self.standardize else None
        self.X_ = self.scaler_(X) if self.standardize else X
        self.y_ = y
        self.classes_ = np.array([0, 1])
        return self

    def kneighbors(self, Q):
        """Return ``(distances, indices)`` of the ``k`` nearest training rows."""
        check_is_fitted(self, "X_")
        Q = check_finite_array(Q, "queries", ndim=2)
        if self.scaler_ is not None:
            Q = self.scaler_(Q)
        n, d = self.X_.shape
        step = max(1, _CHUNK_FLOATS // max(1, n * d))
        dist = np.empty((len(Q), self.k))
        idx = np.empty((len(Q), self.k), dtype=np.int64)
        for s in range(0, len(Q), step):
            diff = Q[s : s + step, None, :] - self.X_[None, :, :]
            d2 = np.sum(diff * diff, axis=2)
            order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            idx[s : s + step] = order
            dist[s : s + step] = np.sqrt(np.take_along_axis(d2, order, axis=1))
        return dist, idx

    def predict(self, Q):
        dist, idx = self.kneighbors(Q)
        labels = self.y_[idx]
        if self.weighting == "uniform":
            w = np.ones_like(dist)
        else:
            exact = dist == 0.0
            with np.errstate(divide="ignore"):
                w = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), 1.0 / dist)
        w1 = np.sum(w * (labels == 1), axis=1)
        w0 = np.sum(w * (labels == 0), axis=1)
        return np.where(w1 > w0, 1, np.where(w0 > w1, 0, labels[:, 0])).astype(np.int64)
