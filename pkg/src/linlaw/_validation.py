"""Input validation helpers used across the estimators and kernels."""

import numbers
import zlib

import numpy as np

from .exceptions import DomainError


def check_finite_array(a, name="array", ndim=None, dtype=np.float64):
    a = np.asarray(a, dtype=dtype)
    if ndim is not None and a.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains NaN or Inf")
    return a


def check_int(value, name, min_value=None, max_value=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if min_value is not None and value < min_value:
        raise DomainError(f"{name} must be >= {min_value}, got {value}")
    if max_value is not None and value > max_value:
        raise DomainError(f"{name} must be <= {max_value}, got {value}")
    return value


def check_binary_labels(y, name="y"):
    y = np.asarray(y)
    if y.ndim != 1:
        raise DomainError(f"{name} must be 1-D")
    if not np.all(np.isin(y, (0, 1))):
        raise DomainError(f"{name} must only contain 0 and 1")
    return y.astype(np.int64)


def check_X_y(X, y):
    X = check_finite_array(X, "X", ndim=2)
    y = check_binary_labels(y)
    if X.shape[0] != y.shape[0]:
        raise DomainError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] == 0:
        raise DomainError("empty training set")
    return X, y


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise DomainError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def substream(seed, name):
    """Independent generator for the named pipeline stage.

    Stages rerun in isolation see the same stream as in a full run, since the
    stream depends only on ``(seed, name)``.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(name.encode())])
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(seed, name="default"):
    if seed is None:
        raise DomainError("a seed is required; global randomness is not used")
    return substream(seed, name)
