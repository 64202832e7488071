"""Estimator-style wrappers over the interpolation surfaces.

Thin fit/predict adapters following the scikit-learn parameter
conventions (constructor stores hyperparameters verbatim, fitted state
lands in trailing-underscore attributes, get_params/set_params come
from BaseEstimator). Only the two interpolation surfaces are wrapped;
the transforms and studies stay plain functions.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import ConfigError
from .hermite import BoundarySpec, evaluate_hermite, fit_hermite
from .series import NodeSet, ScaleSet, evaluate, fit
from .validation import as_points, as_values

_FAMILY_KIND = {
    "laplace_fundamental": "laplace_orders",
    "power_distance": "powers",
}


class DfwInterpolator(BaseEstimator, RegressorMixin):
    """Multiscale radial-kernel interpolant with a fit/predict surface.

    Parameters mirror the functional API: kernel family, scale kind and
    values, fit strategy, and the kernel's ambient dimension (defaults
    to the training dimension).
    """

    def __init__(self, family="mq", scale_kind=None, scale_values=(1.0,),
                 strategy="square", kernel_n=None):
        self.family = family
        self.scale_kind = scale_kind
        self.scale_values = scale_values
        self.strategy = strategy
        self.kernel_n = kernel_n

    def _scales(self):
        kind = self.scale_kind
        if kind is None:
            kind = _FAMILY_KIND.get(self.family, "shape_params")
        return ScaleSet(kind, list(self.scale_values))

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        X = as_points(X, "X")
        y = as_values(y, "y", length=X.shape[0])
        kernel_n = X.shape[1] if self.kernel_n is None else int(self.kernel_n)
        self.model_ = fit(NodeSet(X), self._scales(), y, strategy=self.strategy,
                          family=self.family, kernel_n=kernel_n)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise ConfigError("estimator is not fitted; call fit first")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        X = as_points(X, "X", dim=self.n_features_in_)
        out = evaluate(self.model_, X if X.shape[1] > 1 else X[:, 0])
        return np.atleast_1d(out)


class HermiteInterpolator(BaseEstimator, RegressorMixin):
    """Symmetric collocation with boundary derivative data.

    Boundary geometry and data are hyperparameters; fit(X, y) receives
    the interior nodes and their values.
    """

    def __init__(self, boundary_points=None, boundary_normals=None,
                 dirichlet_values=None, neumann_values=None,
                 family="gaussian", shape=1.0, m=1, power=None, kernel_n=None):
        self.boundary_points = boundary_points
        self.boundary_normals = boundary_normals
        self.dirichlet_values = dirichlet_values
        self.neumann_values = neumann_values
        self.family = family
        self.shape = shape
        self.m = m
        self.power = power
        self.kernel_n = kernel_n

    def _kernel(self, dim):
        from .kernels import KernelSpec

        n = dim if self.kernel_n is None else int(self.kernel_n)
        kwargs = {"family": self.family, "n": n, "m": self.m}
        if self.shape is not None:
            kwargs["shape"] = self.shape
        if self.power is not None:
            kwargs["power"] = self.power
        return KernelSpec(**kwargs)

    def fit(self, X, y):
        if self.boundary_points is None or self.boundary_normals is None:
            raise ConfigError("boundary_points and boundary_normals are required")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        X = as_points(X, "X")
        y = as_values(y, "y", length=X.shape[0])
        layout = BoundarySpec(interior=X, boundary=self.boundary_points,
                              normals=self.boundary_normals)
        fd = as_values(self.dirichlet_values, "dirichlet_values", length=layout.L)
        fn = as_values(self.neumann_values, "neumann_values", length=layout.L)
        self.model_ = fit_hermite(layout, self._kernel(layout.dim), y, fd, fn)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise ConfigError("estimator is not fitted; call fit first")
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        X = as_points(X, "X", dim=self.n_features_in_)
        out = evaluate_hermite(self.model_, X if X.shape[1] > 1 else X[:, 0])
        return np.atleast_1d(out)
