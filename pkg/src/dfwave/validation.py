"""Input validation helpers used across the library and estimators."""

import numpy as np

from .exceptions import ConfigError


def as_point(x, name="point"):
    """Coerce to a finite 1D float array of length >= 1."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigError(f"{name} must be a 1D coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite coordinates")
    return arr


def as_points(X, name="points", dim=None):
    """Coerce to a finite 2D float array of shape (k, n).

    A single point (1D input) becomes a single row.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConfigError(f"{name} must be a (k, n) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite coordinates")
    if dim is not None and arr.shape[1] != dim:
        raise ConfigError(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    return arr


def as_values(y, name="values", length=None):
    """Coerce to a finite 1D float array, optionally of fixed length."""
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    if arr.ndim != 1:
        raise ConfigError(f"{name} must be a 1D value vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite entries")
    if length is not None and arr.size != length:
        raise ConfigError(f"{name} has length {arr.size}, expected {length}")
    return arr


def check_same_dim(a, b, name_a="x", name_b="y"):
    if a.shape[-1] != b.shape[-1]:
        raise ConfigError(
            f"dimension mismatch: {name_a} has dimension {a.shape[-1]}, "
            f"{name_b} has dimension {b.shape[-1]}"
        )


def as_positive_scalar(v, name, allow_zero=False):
    v = float(v)
    if not np.isfinite(v) or (v <= 0.0 and not allow_zero) or v < 0.0:
        kind = "nonnegative" if allow_zero else "positive"
        raise ConfigError(f"{name} must be a finite {kind} number, got {v}")
    return v


def as_unit_vector(v, name="normal", tol=1e-12):
    arr = as_point(v, name)
    norm = float(np.sqrt(np.sum(arr * arr)))
    if abs(norm - 1.0) > tol:
        raise ConfigError(f"{name} must have unit length within {tol}, got norm {norm}")
    return arr
