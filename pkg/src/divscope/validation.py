"""Input coercion helpers shared by the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import NotSymmetric
from .seqio import Read, ReadSet


def check_reads(X, name: str = "X") -> ReadSet:
    """Accept a ReadSet, a sequence of Read objects, or a sequence of strings."""
    if isinstance(X, ReadSet):
        return X
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be a collection of sequences, not a single string")
    items = list(np.asarray(X, dtype=object).ravel()) if isinstance(X, np.ndarray) else list(X)
    if all(isinstance(r, Read) for r in items):
        return ReadSet(tuple(items))
    if all(isinstance(s, str) for s in items):
        return ReadSet.from_sequences(items)
    raise TypeError(f"{name} must contain only Read objects or only strings")


def check_distance_matrix(D, symmetric: bool = False, tol: float = 1e-12) -> np.ndarray:
    """Return D as a float64 array; with `symmetric`, require D == D^T within tol."""
    values = np.asarray(getattr(D, "values", D), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D distance matrix, got {values.ndim} dimensions")
    if not np.isfinite(values).all():
        raise ValueError("distance matrix contains NaN or infinity")
    if symmetric:
        if values.shape[0] != values.shape[1]:
            raise NotSymmetric(f"distance matrix of shape {values.shape} is not square")
        scale = max(1.0, float(np.abs(values).max(initial=0.0)))
        if not np.all(np.abs(values - values.T) <= tol * scale):
            raise NotSymmetric("distance matrix is not symmetric")
    return values


def check_seed(random_state) -> int:
    """Integer seed from an int or None (None means 0, so runs stay reproducible)."""
    if random_state is None:
        return 0
    if isinstance(random_state, (int, np.integer)) and not isinstance(random_state, bool):
        return int(random_state)
    raise TypeError("random_state must be an integer seed or None")
