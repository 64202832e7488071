"""Fractional and potential integral transforms on grids and half-lines.

Spectral operators (fractional Laplacian, Riesz potential, Poisson
extension) act on periodic uniform grids through the FFT; the Riesz
potential also has a direct singular-quadrature route in one and two
dimensions for compactly supported data. The Abel pair works on
half-line samples by product integration. The Weyl and Radon transforms
integrate a compactly supported function handle against a radial kernel
around a center point; they share one quadrature path and differ by a
fixed constant.

Spectral convention: the periodic grid has no analogue of the
whole-space zero frequency, so the Riesz symbol sends the mean mode to
zero and zero-mean input is required. Keep the support of non-periodic
data inside a quarter of the period per axis to keep wrap-around
contamination below the stated tolerances.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .exceptions import ConfigError, SingularError
from .kernels import poisson_kernel_profile
from .validation import as_point

_RESIDUE_RTOL = 1e-12


@dataclass
class GridFunction:
    """Real samples on a uniform periodic grid over [0, period) per axis."""

    values: np.ndarray
    period: np.ndarray
    periodic: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim < 1 or v.ndim > 3:
            raise ConfigError("grid functions support one to three dimensions")
        if not np.all(np.isfinite(v)):
            raise ConfigError("grid values must be finite")
        if any(s < 2 for s in v.shape):
            raise ConfigError("need at least two samples per axis")
        p = np.atleast_1d(np.asarray(self.period, dtype=float))
        if p.size == 1:
            p = np.full(v.ndim, p[0])
        if p.size != v.ndim:
            raise ConfigError("period must be a scalar or one entry per axis")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise ConfigError("period entries must be positive and finite")
        self.values = v
        self.period = p

    @property
    def dims(self):
        return self.values.ndim

    @property
    def shape(self):
        return self.values.shape

    @property
    def spacing(self):
        return self.period / np.asarray(self.shape, dtype=float)

    @property
    def axes(self):
        sp = self.spacing
        return [np.arange(n) * sp[i] for i, n in enumerate(self.shape)]

    def with_values(self, values):
        return GridFunction(values=values, period=self.period.copy(),
                            periodic=self.periodic)


def _require_periodic(f, what):
    if not f.periodic:
        raise ConfigError(f"{what} needs a periodic grid")


def _symbol_norm(f):
    """|kappa| on the FFT mode grid, kappa_i = 2 pi k_i / period_i."""
    sp = f.spacing
    axes = [2.0 * np.pi * np.fft.fftfreq(n, d=sp[i]) for i, n in enumerate(f.shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.sqrt(sum(m * m for m in mesh))


def _real_part(arr, what):
    scale = max(float(np.max(np.abs(arr.real))), 1.0)
    residue = float(np.max(np.abs(arr.imag)))
    if residue > _RESIDUE_RTOL * scale:
        raise SingularError(f"{what} produced imaginary residue {residue:.3e}")
    return arr.real


def fractional_laplacian(f, y):
    """(-Laplacian)^(y/2) on a periodic grid; y = 2 is the classical case."""
    if not isinstance(f, GridFunction):
        raise ConfigError("fractional_laplacian expects a GridFunction")
    y = float(y)
    if not 0.0 < y <= 2.0:
        raise ConfigError("fractional order must satisfy 0 < y <= 2")
    _require_periodic(f, "fractional_laplacian")
    sym = _symbol_norm(f) ** y
    out = np.fft.ifftn(np.fft.fftn(f.values) * sym)
    return f.with_values(_real_part(out, "fractional_laplacian"))


def _riesz_prefactor(n, s):
    return math.gamma((n - s) / 2.0) / (math.pi ** (n / 2.0) * 2.0**s * math.gamma(s / 2.0))


def _riesz_spectral(f, s):
    if not 0.0 < s < 2.0:
        raise ConfigError("spectral Riesz order must satisfy 0 < s < 2")
    _require_periodic(f, "riesz_potential")
    mean = float(np.mean(f.values))
    peak = float(np.max(np.abs(f.values)))
    if abs(mean) > 1e-10 * max(peak, 1e-300):
        raise ConfigError(
            f"riesz_potential needs zero-mean input; |mean| = {abs(mean):.3e}")
    norm = _symbol_norm(f)
    with np.errstate(divide="ignore"):
        sym = np.where(norm > 0.0, norm ** (-s), 0.0)
    out = np.fft.ifftn(np.fft.fftn(f.values) * sym)
    return f.with_values(_real_part(out, "riesz_potential"))


def _riesz_direct_1d(f, s):
    t = f.axes[0]
    vals = f.values
    x = t[:, None]
    ta = t[None, :-1]
    tb = t[None, 1:]
    # moments of |x-t|^(s-1) against a linear segment, antiderivative
    # sgn(t-x)|t-x|^s / s
    a0 = np.sign(ta - x) * np.abs(ta - x) ** s / s
    b0 = np.sign(tb - x) * np.abs(tb - x) ** s / s
    m0 = b0 - a0
    a1 = np.abs(ta - x) ** (s + 1.0) / (s + 1.0)
    b1 = np.abs(tb - x) ** (s + 1.0) / (s + 1.0)
    m1 = x * m0 + (b1 - a1)
    h = np.diff(t)[None, :]
    slope = np.diff(vals)[None, :] / h
    base = vals[:-1][None, :]
    integral = np.sum(base * m0 + slope * (m1 - ta * m0), axis=1)
    return f.with_values(_riesz_prefactor(1, s) * integral)


def _riesz_direct_2d(f, s):
    h0, h1 = f.spacing
    t0, t1 = f.axes
    vals = f.values
    pts = np.stack(np.meshgrid(t0, t1, indexing="ij"), axis=-1).reshape(-1, 2)
    flat = vals.ravel()
    cell = h0 * h1
    # midpoint rule off the singular cell, exact polar moment on it;
    # the polar weight assumes square cells
    if abs(h0 - h1) > 1e-12 * max(h0, h1):
        raise ConfigError("direct 2-D Riesz quadrature needs square grid cells")
    u, w = roots_legendre(64)
    theta = 0.25 * np.pi * (u + 1.0) / 2.0 + 0.0
    wt = 0.25 * np.pi * w / 2.0
    sec_int = float(np.sum(wt / np.cos(theta) ** s))
    w_sing = (8.0 / s) * (h0 / 2.0) ** s * sec_int
    d = pts[:, None, :] - pts[None, :, :]
    r = np.sqrt(np.sum(d * d, axis=2))
    np.fill_diagonal(r, 1.0)
    kern = r ** (s - 2.0) * cell
    np.fill_diagonal(kern, w_sing)
    out = kern @ flat
    return f.with_values(_riesz_prefactor(2, s) * out.reshape(vals.shape))


def riesz_potential(f, s, method="spectral"):
    """Riesz potential of order s.

    method="spectral": periodic symbol |kappa|^(-s) with the zero mode
    sent to zero (zero-mean input enforced). method="direct": singular
    quadrature of the defining integral with its Gamma prefactor, for
    compactly supported samples in one or two dimensions; the |x-t|^(s-n)
    singularity is integrated exactly on the cell containing it.
    """
    if not isinstance(f, GridFunction):
        raise ConfigError("riesz_potential expects a GridFunction")
    s = float(s)
    if method == "spectral":
        return _riesz_spectral(f, s)
    if method == "direct":
        n = f.dims
        if n not in (1, 2):
            raise ConfigError("direct Riesz route supports one or two dimensions")
        if not 0.0 < s < n:
            raise ConfigError(f"direct Riesz order must satisfy 0 < s < {n}")
        return _riesz_direct_1d(f, s) if n == 1 else _riesz_direct_2d(f, s)
    raise ConfigError(f"unknown riesz method {method!r}")


@dataclass
class RadialSamples:
    """Samples of a function on [0, R]; abscissae start at 0."""

    abscissae: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if x.size < 2:
            raise ConfigError("need at least two radial samples")
        if x.size != v.size:
            raise ConfigError("abscissae and values must have equal length")
        if x[0] != 0.0:
            raise ConfigError("radial abscissae must start at 0")
        if np.any(np.diff(x) <= 0):
            raise ConfigError("radial abscissae must be strictly increasing")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ConfigError("radial samples must be finite")
        self.abscissae = x
        self.values = v


def _check_beta(beta):
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ConfigError("Abel exponent must satisfy 0 < beta < 1")
    return beta


def _product_integrate(t, g, expo):
    """F(t_i) = integral_0^{t_i} g(u) (t_i - u)^(expo-1) du with g taken
    piecewise linear between samples; closed-form segment moments."""
    x = t[:, None]
    tk = t[None, :-1]
    tk1 = t[None, 1:]
    valid = tk1 <= x + 0.0
    b = np.where(valid, x - tk, 0.0)
    a = np.where(valid, x - tk1, 0.0)
    i0 = (b**expo - a**expo) / expo
    i1 = b * i0 - (b ** (expo + 1.0) - a ** (expo + 1.0)) / (expo + 1.0)
    slope = np.diff(g)[None, :] / np.diff(t)[None, :]
    terms = np.where(valid, g[:-1][None, :] * i0 + slope * i1, 0.0)
    return np.sum(terms, axis=1)


def abel_forward(g, beta):
    """f(x) = integral_0^x g(t) (x-t)^(beta-1) dt on the sample grid."""
    if not isinstance(g, RadialSamples):
        g = RadialSamples(*g) if isinstance(g, tuple) else RadialSamples(g.abscissae, g.values)
    beta = _check_beta(beta)
    f = _product_integrate(g.abscissae, g.values, beta)
    f[0] = 0.0
    return RadialSamples(abscissae=g.abscissae.copy(), values=f)


def _lagrange_derivative(x, h):
    """d h / d x at the nodes from sliding 5-point Lagrange stencils."""
    n = x.size
    width = min(5, n)
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - width // 2, 0), n - width)
        idx = np.arange(lo, lo + width)
        xs = x[idx]
        acc = 0.0
        for jj, j in enumerate(idx):
            if j == i:
                acc += h[j] * np.sum(1.0 / (x[i] - np.delete(xs, jj)))
            else:
                rest = np.delete(xs, jj)
                rest = rest[rest != x[i]]
                num = np.prod(x[i] - rest)
                den = np.prod(x[j] - np.delete(xs, jj))
                acc += h[j] * num / den
        out[i] = acc
    return out


def abel_backward(f, beta):
    """g(t) = (sin(pi beta)/pi) d/dt integral_0^t f(x) (t-x)^(-beta) dx."""
    if not isinstance(f, RadialSamples):
        raise ConfigError("abel_backward expects RadialSamples")
    beta = _check_beta(beta)
    scale = max(float(np.max(np.abs(f.values))), 1.0)
    if abs(f.values[0]) > 1e-8 * scale:
        raise ConfigError("abel_backward needs f(0) = 0")
    inner = _product_integrate(f.abscissae, f.values, 1.0 - beta)
    g = math.sin(math.pi * beta) / math.pi * _lagrange_derivative(f.abscissae, inner)
    return RadialSamples(abscissae=f.abscissae.copy(), values=g)


@dataclass
class RadialQuadratureSpec:
    """Quadrature controls for the Weyl/Radon integrals. support_radius
    declares the radius around the center beyond which f vanishes."""

    support_radius: float
    n_radial: int = 64
    n_angular: int = 128
    n_polar: int = 64
    breakpoints: tuple = field(default=None)

    def __post_init__(self):
        self.support_radius = float(self.support_radius)
        if not self.support_radius > 0.0:
            raise ConfigError("support_radius must be positive")
        for name in ("n_radial", "n_angular", "n_polar"):
            v = int(getattr(self, name))
            if v < 2:
                raise ConfigError(f"{name} must be at least 2")
            setattr(self, name, v)
        if self.breakpoints is not None:
            bp = tuple(float(b) for b in self.breakpoints)
            if any(b <= 0 for b in bp) or list(bp) != sorted(set(bp)):
                raise ConfigError("breakpoints must be positive, sorted, distinct")
            self.breakpoints = bp


def _eval_handle(f, pts):
    try:
        out = np.asarray(f(pts), dtype=float)
        if out.shape == (pts.shape[0],):
            return out
    except Exception:
        pass
    return np.asarray([float(f(p)) for p in pts], dtype=float)


def _angular_sum_factory(f, xi, n, quad):
    """Returns S(r) = integral of f(xi + r omega) over the unit sphere."""
    if n == 2:
        theta = 2.0 * np.pi * np.arange(quad.n_angular) / quad.n_angular
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        wts = np.full(quad.n_angular, 2.0 * np.pi / quad.n_angular)
    else:
        c, wc = roots_legendre(quad.n_polar)
        theta = 2.0 * np.pi * np.arange(quad.n_angular) / quad.n_angular
        st = np.sqrt(1.0 - c**2)
        dirs = np.empty((quad.n_polar * quad.n_angular, 3))
        dirs[:, 0] = np.outer(st, np.cos(theta)).ravel()
        dirs[:, 1] = np.outer(st, np.sin(theta)).ravel()
        dirs[:, 2] = np.outer(c, np.ones_like(theta)).ravel()
        wts = np.outer(wc, np.full(quad.n_angular, 2.0 * np.pi / quad.n_angular)).ravel()

    def s_of_r(rs):
        out = np.empty(rs.size)
        for i, r in enumerate(rs):
            pts = xi[None, :] + r * dirs
            out[i] = float(np.dot(wts, _eval_handle(f, pts)))
        return out

    return s_of_r


def _radial_panels(lo, hi, breakpoints):
    pts = [lo]
    if breakpoints:
        pts.extend(b for b in breakpoints if lo < b < hi)
    pts.append(hi)
    return list(zip(pts[:-1], pts[1:]))


def _weyl_integral(f, xi, gamma, n, quad):
    rmax = quad.support_radius
    if gamma >= rmax:
        return 0.0
    s_of_r = _angular_sum_factory(f, xi, n, quad)
    u, w = roots_legendre(quad.n_radial)
    total = 0.0
    if n == 2 and gamma > 0.0:
        # r = gamma cosh(v) removes the (r^2-gamma^2)^(-1/2) endpoint
        # singularity: the radial element becomes gamma^2 cosh^2(v) dv
        vmax = math.acosh(rmax / gamma)
        vb = [math.acosh(b / gamma) for b in (quad.breakpoints or ()) if gamma < b < rmax]
        for a, b in _radial_panels(0.0, vmax, vb):
            v = 0.5 * (b - a) * u + 0.5 * (a + b)
            r = gamma * np.cosh(v)
            vals = gamma**2 * np.cosh(v) ** 2 * s_of_r(r)
            total += 0.5 * (b - a) * float(np.dot(w, vals))
        return total
    for a, b in _radial_panels(gamma, rmax, quad.breakpoints):
        r = 0.5 * (b - a) * u + 0.5 * (a + b)
        if n == 2:
            fac = r  # r^2 (r^2)^(-1/2) at gamma = 0
        else:
            fac = r**3
        total += 0.5 * (b - a) * float(np.dot(w, fac * s_of_r(r)))
    return total


def _check_weyl_args(xi, gamma, n, quad):
    if n not in (2, 3):
        raise ConfigError("Weyl/Radon transforms support n in {2, 3}")
    if quad is None or not isinstance(quad, RadialQuadratureSpec):
        raise ConfigError("a RadialQuadratureSpec with support_radius is required")
    gamma = float(gamma)
    if gamma < 0.0:
        raise ConfigError("gamma must be nonnegative")
    xi = as_point(xi, "xi")
    if xi.size != n:
        raise ConfigError("center point dimension must equal n")
    return xi, gamma


def weyl_transform(f, xi, gamma, n, quadrature):
    """Radial Weyl transform: prefactor 2 Gamma(n/2)/(sqrt(pi)
    Gamma((n-1)/2)) times the integral of f(x) (|xi-x|^2-gamma^2)^((n-3)/2)
    |xi-x| over |xi-x| >= gamma."""
    xi, gamma = _check_weyl_args(xi, gamma, n, quadrature)
    pref = 2.0 * math.gamma(n / 2.0) / (math.sqrt(math.pi) * math.gamma((n - 1) / 2.0))
    return pref * _weyl_integral(f, xi, gamma, n, quadrature)


def radon_dfw(f, xi, gamma, n, quadrature):
    """Radial Radon transform; equals (pi^(n/2)/Gamma(n/2)) times the
    Weyl transform by construction, so the proportionality is exact."""
    if n not in (2, 3):
        raise ConfigError("Weyl/Radon transforms support n in {2, 3}")
    ratio = math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return ratio * weyl_transform(f, xi, gamma, n, quadrature)


def laplace_potential_dfw(f, xi, n, quadrature):
    """Laplace potential transform; the n = 2 kernel degenerates and is
    rejected. Shares the Radon code path at gamma = 0."""
    if n == 2:
        raise ConfigError("laplace potential excludes n = 2")
    if n != 3:
        raise ConfigError("laplace potential is implemented for n = 3")
    return radon_dfw(f, xi, 0.0, n, quadrature)


def poisson_extension(f, q):
    """Harmonic extension to height q > 0 by periodic convolution with
    the Poisson kernel, renormalized to unit discrete mass so constants
    are reproduced exactly; q -> 0 recovers f, q -> infinity the mean."""
    if not isinstance(f, GridFunction):
        raise ConfigError("poisson_extension expects a GridFunction")
    q = float(q)
    if not q > 0.0:
        raise ConfigError("height q must be positive")
    _require_periodic(f, "poisson_extension")
    dists = []
    for i, ax in enumerate(f.axes):
        dists.append(np.minimum(ax, f.period[i] - ax))
    mesh = np.meshgrid(*dists, indexing="ij")
    r = np.sqrt(sum(m * m for m in mesh))
    kern = poisson_kernel_profile(r, q, f.dims)
    kern = kern / float(np.sum(kern))
    out = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(kern))
    return f.with_values(_real_part(out, "poisson_extension"))
