"""Distance primitives: the exponent-s distance and the anisotropic
(geodesic) distance defined by an SPD medium tensor.

All kernels in the library reduce their point arguments through one of
these two functions.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import ConfigError, SingularError
from .validation import as_point, check_same_dim


def general_distance(x, y, s):
    """(sum_i |x_i - y_i|^s)^(1/s) for s > 0.

    Symmetric in x and y (bit-exactly: |x-y| and |y-x| are identical
    floats) and zero iff x == y.
    """
    x = as_point(x, "x")
    y = as_point(y, "y")
    check_same_dim(x, y)
    s = float(s)
    if not np.isfinite(s) or s <= 0.0:
        raise ConfigError(f"distance exponent s must be positive and finite, got {s}")
    d = np.abs(x - y)
    if not d.any():
        return 0.0
    # factor out the largest term so fractional exponents cannot overflow
    m = d.max()
    return float(m * np.sum((d / m) ** s) ** (1.0 / s))


class AnisotropyTensor:
    """SPD matrix kappa defining the quadratic-form distance
    R^2 = (x-y)^T kappa^{-1} (x-y).

    Validated at construction: exact symmetry as stored, positive
    definiteness via Cholesky (the factor is kept for the quadratic form
    and the determinant).
    """

    def __init__(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1]:
            raise ConfigError(f"tensor must be square, got shape {kappa.shape}")
        if not np.all(np.isfinite(kappa)):
            raise ConfigError("tensor contains non-finite entries")
        if not np.array_equal(kappa, kappa.T):
            raise ConfigError("tensor must be symmetric exactly as stored")
        try:
            chol = np.linalg.cholesky(kappa)
        except np.linalg.LinAlgError as exc:
            raise ConfigError(f"tensor is not positive definite: {exc}") from exc
        self.kappa = kappa
        self.chol = chol  # lower triangular, kappa = chol @ chol.T
        self.det = float(np.prod(np.diag(chol)) ** 2)

    @property
    def dim(self):
        return self.kappa.shape[0]

    def quadratic_form(self, d):
        """(d^T kappa^{-1} d) for a difference vector or (k, n) batch."""
        d = np.asarray(d, dtype=float)
        batch = d.ndim == 2
        z = solve_triangular(self.chol, d.T if batch else d, lower=True)
        if batch:
            return np.sum(z * z, axis=0)
        return float(np.sum(z * z))

    def __eq__(self, other):
        return isinstance(other, AnisotropyTensor) and np.array_equal(self.kappa, other.kappa)

    def __hash__(self):
        return hash(self.kappa.tobytes())

    def __repr__(self):
        return f"AnisotropyTensor({self.kappa.tolist()})"


def geodesic_distance(x, y, kappa):
    """Quadratic-form distance R with R^2 = (x-y)^T kappa^{-1} (x-y).

    kappa may be an AnisotropyTensor or a raw SPD matrix.
    """
    if not isinstance(kappa, AnisotropyTensor):
        kappa = AnisotropyTensor(kappa)
    x = as_point(x, "x")
    y = as_point(y, "y")
    check_same_dim(x, y)
    if x.size != kappa.dim:
        raise ConfigError(f"points have dimension {x.size}, tensor has dimension {kappa.dim}")
    d = x - y
    r2 = kappa.quadratic_form(d)
    if r2 < 0.0 or (r2 == 0.0 and d.any()):
        raise SingularError("quadratic form is not positive for distinct points; corrupted tensor")
    return float(np.sqrt(r2))


def euclidean(x, y):
    """Plain Euclidean distance between two coordinate vectors."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(np.sqrt(np.sum(d * d)))


def pairwise_euclidean(X, Y):
    """(k, m) matrix of Euclidean distances between rows of X and Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    diff = X[:, None, :] - Y[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))
