"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

import numbers

import numpy as np

from .core import WeightMatrix
from .exceptions import DimensionError, ParameterError


def check_data(X):
    """Return ``(values, weights)`` for a 2-D array where NaN marks missing entries.

    Infinite values are rejected; missing entries get weight 0 and value 0.
    """
    A = np.array(X, dtype=np.float64)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"expected a non-empty 2-D array, got shape {A.shape}")
    if np.isinf(A).any():
        raise ParameterError("data contains infinite values")
    missing = np.isnan(A)
    A[missing] = 0.0
    return A, (~missing).astype(np.float64)


def check_sample_weight(weights, shape, observed):
    """Combine user weights with the observation mask."""
    if weights is None:
        return WeightMatrix(observed)
    W = np.array(weights, dtype=np.float64)
    if W.shape != shape:
        raise DimensionError(f"weights have shape {W.shape}, data has shape {shape}")
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise ParameterError("weights must be finite and nonnegative")
    return WeightMatrix(W * observed)


def check_positive_int(value, name, upper=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    if upper is not None and value > upper:
        raise ParameterError(f"{name} must be <= {upper}, got {value}")
    return int(value)


def check_seed(random_state):
    """Integer seed for the multistart generator (``None`` means 0)."""
    if random_state is None:
        return 0
    if isinstance(random_state, numbers.Integral):
        return int(random_state)
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(0, 2**31 - 1))
    raise ParameterError(f"random_state must be None, an int or a numpy Generator, got {random_state!r}")
