"""Radial kernel profiles and their derivatives.

Each kernel family is authored once as a symbolic expression in the
radius r. Derivatives up to fourth order, the combinations needed by the
collocation blocks (phi'/r, Hessian coefficients, radial Laplacians) and
their one-sided limits at r -> 0+ are machine-derived with sympy,
lambdified to numpy, and cached per parameter set. Evaluation at r = 0
returns the cached limit when it is finite and raises otherwise.

Families:

- laplace_fundamental(n, m): unnormalized fundamental solution of the
  (m+1)-fold iterated Laplacian in dimension n: r^(2m+2-n), with an extra
  ln r factor when 2m+2-n is an even nonnegative integer.
- mq / inverse_mq: sqrt(r^2+c^2) and its reciprocal.
- mq_tps: the shifted polyharmonic profile, (r^2+c^2)^m ln(r^2+c^2) in
  n=2 and (r^2+c^2)^((2m-1)/2) in n=3. The n=2 form keeps the squared
  log argument as printed, so its c -> 0 limit is twice
  laplace_fundamental (documented, tested).
- poisson_kernel: c_n q / (r^2+q^2)^((n+1)/2) with c_n =
  Gamma((n+1)/2)/pi^((n+1)/2), the constant that makes the kernel
  integrate to one over n-space.
- gaussian: exp(-r^2/alpha^2).
- power_distance: r^p.

A KernelSpec with an anisotropy tensor selects the geodesic variant: the
radius is the quadratic-form distance and the profile is multiplied by
det(kappa)^(-1/2).
"""

from dataclasses import dataclass
from functools import lru_cache
from types import SimpleNamespace

import numpy as np
import sympy as sp
from scipy.linalg import solve_triangular

from .distances import AnisotropyTensor
from .exceptions import ConfigError, SingularError
from .validation import as_point, as_points, as_unit_vector, check_same_dim

FAMILIES = (
    "laplace_fundamental",
    "mq",
    "inverse_mq",
    "mq_tps",
    "poisson_kernel",
    "gaussian",
    "power_distance",
)

_SHAPE_REQUIRED = {"poisson_kernel", "gaussian"}  # strictly positive
_SHAPE_OPTIONAL = {"mq", "inverse_mq", "mq_tps"}  # nonnegative, default 0


def normalize_family(token):
    fam = str(token).strip().lower().replace("-", "_")
    if fam == "poisson":
        fam = "poisson_kernel"
    if fam == "power":
        fam = "power_distance"
    if fam not in FAMILIES:
        raise ConfigError(f"unknown kernel family {token!r}; expected one of {FAMILIES}")
    return fam


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family tag plus parameters.

    n parametrizes the profile for the dimension-dependent families
    (laplace_fundamental, mq_tps, poisson_kernel); m is the order of the
    polyharmonic families; shape is c, q or alpha depending on family;
    power is the exponent of the power_distance family. An anisotropy
    tensor, when present, must match dimension n and switches evaluation
    to the geodesic variant.
    """

    family: str
    n: int = 1
    m: int = 1
    shape: float | None = None
    power: float | None = None
    anisotropy: AnisotropyTensor | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", normalize_family(self.family))
        fam = self.family
        n = int(self.n)
        if n < 1:
            raise ConfigError(f"dimension n must be >= 1, got {self.n}")
        object.__setattr__(self, "n", n)
        m = int(self.m)
        if fam in ("laplace_fundamental", "mq_tps") and m < 0:
            raise ConfigError(f"order m must be >= 0, got {self.m}")
        object.__setattr__(self, "m", m)
        if fam == "mq_tps" and n not in (2, 3):
            raise ConfigError("mq_tps profiles are defined for n in (2, 3)")
        shape = self.shape
        if fam in _SHAPE_REQUIRED:
            if shape is None or not np.isfinite(shape) or float(shape) <= 0.0:
                raise ConfigError(f"{fam} requires a positive shape parameter, got {shape}")
            shape = float(shape)
        elif fam in _SHAPE_OPTIONAL:
            shape = 0.0 if shape is None else float(shape)
            if not np.isfinite(shape) or shape < 0.0:
                raise ConfigError(f"{fam} shape parameter must be >= 0, got {self.shape}")
        elif shape is not None:
            raise ConfigError(f"{fam} takes no shape parameter")
        object.__setattr__(self, "shape", shape)
        power = self.power
        if fam == "power_distance":
            if power is None or not np.isfinite(power):
                raise ConfigError("power_distance requires a finite exponent")
            power = float(power)
        elif power is not None:
            raise ConfigError(f"{fam} takes no power exponent")
        object.__setattr__(self, "power", power)
        if self.anisotropy is not None:
            if not isinstance(self.anisotropy, AnisotropyTensor):
                object.__setattr__(self, "anisotropy", AnisotropyTensor(self.anisotropy))
            if self.anisotropy.dim != n:
                raise ConfigError(
                    f"anisotropy tensor dimension {self.anisotropy.dim} != kernel n = {n}"
                )

    def _key(self):
        return (self.family, self.n, self.m, self.shape, self.power)


def _profile_expr(family, n, m, shape, power):
    r = sp.Symbol("r", positive=True)
    if family == "laplace_fundamental":
        p = 2 * m + 2 - n
        expr = r**p
        if p >= 0 and p % 2 == 0:
            expr = expr * sp.log(r)
    elif family == "mq":
        expr = sp.sqrt(r**2 + sp.Float(shape) ** 2)
    elif family == "inverse_mq":
        expr = 1 / sp.sqrt(r**2 + sp.Float(shape) ** 2)
    elif family == "mq_tps":
        base = r**2 + sp.Float(shape) ** 2
        if n == 2:
            expr = base**m * sp.log(base)
        else:
            expr = base ** sp.Rational(2 * m - 1, 2)
    elif family == "poisson_kernel":
        q = sp.Float(shape)
        cn = sp.gamma(sp.Rational(n + 1, 2)) / sp.pi ** sp.Rational(n + 1, 2)
        expr = cn * q / (r**2 + q**2) ** sp.Rational(n + 1, 2)
    elif family == "gaussian":
        expr = sp.exp(-(r**2) / sp.Float(shape) ** 2)
    elif family == "power_distance":
        expr = r ** sp.nsimplify(power, rational=True)
    else:  # pragma: no cover - guarded by normalize_family
        raise ConfigError(f"unknown family {family}")
    return expr, r


class _RadialFn:
    """One symbolic radial expression with a cached r -> 0+ limit.

    Vectorized evaluation; entries at r = 0 take the limit value when it
    is finite, otherwise a SingularError is raised.
    """

    def __init__(self, expr, r, label):
        self.label = label
        self.expr = expr
        self._fn = sp.lambdify(r, expr, modules="numpy")
        lim = None
        try:
            val = sp.limit(expr, r, 0, dir="+")
            if val.is_real and val.is_finite:
                lim = float(val)
        except Exception:
            lim = None
        self.limit = lim

    def __call__(self, rr):
        arr = np.asarray(rr, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise ConfigError(f"radius must be finite and >= 0 for {self.label}")
        out = np.empty(arr.shape, dtype=float)
        zero = arr == 0.0
        if zero.any():
            if self.limit is None:
                raise SingularError(f"{self.label} is singular at r = 0")
            out[zero] = self.limit
        pos = ~zero
        if pos.any():
            vals = self._fn(arr[pos])
            out[pos] = np.broadcast_to(np.asarray(vals, dtype=float), arr[pos].shape)
        return float(out[0]) if scalar else out


@lru_cache(maxsize=None)
def _calc(key, dim):
    """Derivative bundle for one profile, with radial Laplacians in the
    given ambient dimension."""
    family, n, m, shape, power = key
    expr, r = _profile_expr(family, n, m, shape, power)
    d = [expr]
    for _ in range(4):
        d.append(sp.diff(d[-1], r))
    lap = sp.cancel(sp.together(d[2] + (dim - 1) * d[1] / r))
    lap1 = sp.diff(lap, r)
    lap2 = sp.diff(lap1, r)
    mk = lambda e, lbl: _RadialFn(e, r, f"{family}{key[1:]}:{lbl}")
    return SimpleNamespace(
        dim=dim,
        phi=mk(d[0], "phi"),
        d1=mk(d[1], "phi'"),
        d2=mk(d[2], "phi''"),
        g1=mk(sp.cancel(sp.together(d[1] / r)), "phi'/r"),
        bfun=mk(sp.cancel(sp.together((d[2] - d[1] / r) / r**2)), "(phi''-phi'/r)/r^2"),
        lap=mk(lap, "lap"),
        lap1=mk(lap1, "lap'"),
        lapg1=mk(sp.cancel(sp.together(lap1 / r)), "lap'/r"),
        laplap=mk(sp.cancel(sp.together(lap2 + (dim - 1) * lap1 / r)), "lap(lap)"),
    )


def radial_calc(spec, dim=None):
    """Derivative bundle for a KernelSpec; dim defaults to spec.n."""
    return _calc(spec._key(), spec.n if dim is None else int(dim))


def radial_profile(spec, r, deriv=0):
    """Evaluate the radial profile (or its deriv-th radial derivative)."""
    calc = radial_calc(spec)
    fns = (calc.phi, calc.d1, calc.d2)
    if not 0 <= deriv < len(fns):
        raise ConfigError(f"deriv must be 0, 1 or 2, got {deriv}")
    return fns[deriv](r)


def laplace_fundamental_profile(r, n, m):
    """Unnormalized polyharmonic profile r^(2m+2-n) (times ln r when that
    exponent is an even nonnegative integer)."""
    if int(m) < 0:
        raise ConfigError(f"order m must be >= 0, got {m}")
    spec = KernelSpec("laplace_fundamental", n=n, m=m)
    return radial_profile(spec, r)


def mq_profile(r, c, variant="mq", m=1, n=3):
    """Multiquadric-type profiles: mq, inverse_mq, or mq_tps(m, n)."""
    fam = normalize_family(variant)
    if fam not in ("mq", "inverse_mq", "mq_tps"):
        raise ConfigError(f"variant must be an mq-type family, got {variant!r}")
    spec = KernelSpec(fam, n=n, m=m, shape=c)
    if fam == "mq_tps" and spec.n == 2 and spec.shape == 0.0:
        if np.any(np.atleast_1d(np.asarray(r, dtype=float)) == 0.0):
            raise SingularError("mq_tps with n=2 takes log of zero at r=0 when c=0")
    return radial_profile(spec, r)


def poisson_kernel_profile(r, q, n):
    """Unit-mass bell c_n q/(r^2+q^2)^((n+1)/2); positive, decreasing."""
    spec = KernelSpec("poisson_kernel", n=n, shape=q)
    return radial_profile(spec, r)


def gaussian_profile(r, alpha):
    """exp(-r^2/alpha^2); equals 1 at r = 0."""
    spec = KernelSpec("gaussian", shape=alpha)
    return radial_profile(spec, r)


def _kinv_apply(tensor, d):
    """kappa^{-1} d via two triangular solves; d is (n,) or (k, n)."""
    batch = d.ndim == 2
    z = solve_triangular(tensor.chol, d.T if batch else d, lower=True)
    w = solve_triangular(tensor.chol.T, z, lower=False)
    return w.T if batch else w


def eval_kernel(spec, x, center):
    """Kernel value at x for a translate centered at center.

    Isotropic specs use the Euclidean radius; an anisotropy tensor
    switches to the quadratic-form radius and multiplies the profile by
    det(kappa)^(-1/2).
    """
    center = as_point(center, "center")
    X = as_points(x, "x")
    check_same_dim(X, center, "x", "center")
    scalar = np.asarray(x).ndim == 1
    diff = X - center[None, :]
    if spec.anisotropy is not None:
        if spec.anisotropy.dim != center.size:
            raise ConfigError(
                f"points have dimension {center.size}, tensor {spec.anisotropy.dim}"
            )
        r = np.sqrt(spec.anisotropy.quadratic_form(diff))
        vals = radial_profile(spec, r) / np.sqrt(spec.anisotropy.det)
    else:
        r = np.sqrt(np.sum(diff * diff, axis=1))
        vals = radial_profile(spec, r)
    vals = np.atleast_1d(vals)
    return float(vals[0]) if scalar else vals


def kernel_normal_derivative(spec, x, center, normal):
    """Directional derivative of the kernel translate along a unit vector.

    Equals phi'(r) ((x-center).normal)/r away from the center; at the
    center it is 0 exactly when phi'(0+) = 0 (smooth bounded families),
    and an error otherwise.
    """
    center = as_point(center, "center")
    X = as_points(x, "x")
    check_same_dim(X, center, "x", "center")
    normal = as_unit_vector(normal)
    if normal.size != center.size:
        raise ConfigError("normal dimension does not match the points")
    scalar = np.asarray(x).ndim == 1
    diff = X - center[None, :]
    calc = radial_calc(spec)
    if spec.anisotropy is not None:
        r = np.sqrt(spec.anisotropy.quadratic_form(diff))
        dots = _kinv_apply(spec.anisotropy, diff) @ normal
        pref = 1.0 / np.sqrt(spec.anisotropy.det)
    else:
        r = np.sqrt(np.sum(diff * diff, axis=1))
        dots = diff @ normal
        pref = 1.0
    out = np.empty(r.shape, dtype=float)
    zero = r == 0.0
    if zero.any():
        if calc.d1.limit is None or calc.d1.limit != 0.0:
            raise SingularError("kernel is not differentiable at its center")
        out[zero] = 0.0
    pos = ~zero
    if pos.any():
        out[pos] = calc.g1(r[pos]) * dots[pos]
    out *= pref
    return float(out[0]) if scalar else out
