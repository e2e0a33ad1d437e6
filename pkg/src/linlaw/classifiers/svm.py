import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import as_generator, check_finite_array, check_int, check_is_fitted, check_X_y
from ..exceptions import DomainError
from ._scaling import fit_standardizer


def hinge_objective(w, Z, s, lam):
    """``lam/2 * |w|^2 + mean(max(0, 1 - s * Z @ w))``; equals 1.0 at ``w = 0``."""
    margins = 1.0 - s * (Z @ w)
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, margins)))


class LinearSVM(ClassifierMixin, BaseEstimator):
    """Linear SVM trained by Pegasos-style stochastic subgradient descent.

    Features are standardized with training statistics and augmented with a
    constant column, so the bias is learned (and regularized) with the
    weights. The regularization is ``lam = 1 / (C * n)``. Each epoch visits
    the rows in a seeded random order in mini-batches with step size
    ``1 / (lam * t)``; the epoch-end iterate with the lowest objective is
    kept, starting from ``w = 0`` (objective 1.0).
    """

    def __init__(self, C=1.0, epochs=20, batch_size=32, seed=0):
        self.C = C
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if not self.C > 0:
            raise DomainError(f"C must be positive, got {self.C}")
        check_int(self.epochs, "epochs", min_value=1)
        check_int(self.batch_size, "batch_size", min_value=1)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.scaler_ = fit_standardizer(X)
        if y.min() == y.max():
            self.constant_ = int(y[0])
            self.coef_ = np.zeros(X.shape[1] + 1)
            self.objective_ = 1.0
            return self
        self.constant_ = None

        Z = np.hstack([self.scaler_(X), np.ones((len(X), 1))])
        s = 2.0 * y - 1.0
        n = len(Z)
        lam = 1.0 / (self.C * n)
        radius = 1.0 / np.sqrt(lam)
        rng = as_generator(self.seed, "svm")
        w = np.zeros(Z.shape[1])
        best_w, best_obj = w.copy(), hinge_objective(w, Z, s, lam)
        t = 0
        for _ in range(self.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = perm[start : start + self.batch_size]
                t += 1
                eta = 1.0 / (lam * t)
                zb, sb = Z[batch], s[batch]
                viol = sb * (zb @ w) < 1.0
                grad_loss = (sb[viol, None] * zb[viol]).sum(axis=0) / len(batch)
                w = (1.0 - eta * lam) * w + eta * grad_loss
                norm = np.sqrt(w @ w)
                if norm > radius:
                    w *= radius / norm
            obj = hinge_objective(w, Z, s, lam)
            if obj < best_obj:
                best_w, best_obj = w.copy(), obj
        self.coef_ = best_w
        self.objective_ = best_obj
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_finite_array(X, "X", ndim=2)
        Z = np.hstack([self.scaler_(X), np.ones((len(X), 1))])
        return Z @ self.coef_

    def predict(self, X):
        if self.constant_ is not None:
            check_finite_array(X, "X", ndim=2)
            return np.full(len(X), self.constant_, dtype=np.int64)
        return (self.decision_function(X) > 0).astype(np.int64)
