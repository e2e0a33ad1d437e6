import numpy as np


def fit_standardizer(X):
    """Column standardizer fitted on ``X``; constant columns are only centred."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)

    def apply(Z):
        return (Z - mean) / std

    return apply
