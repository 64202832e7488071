"""Convergence studies and the truncation-bound consistency harness.

A study sweeps node counts M (and scale counts N) for one target and
kernel, fits the expansion per row, and measures errors on a dense
grid. The harness also least-squares-fits the free constant of the
conjectured truncation bound

    R(x) <= C / (M!)^N * prod_k |x - x_k| * deriv_bound

against the observed row errors and reports the relative residual of
that fit as a consistency score. The score is reported, never asserted:
the bound is a conjecture and the harness only measures how well it
shapes the data.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .exceptions import ConfigError, DfwaveError
from .kernels import KernelSpec
from .nodes import DomainBox, chebyshev_nodes, optimize_minmax
from .series import NodeSet, ScaleSet, evaluate, fit
from .validation import as_points

NODE_RULES = ("uniform", "chebyshev", "optimized")


def _as_box(domain):
    if isinstance(domain, DomainBox):
        return domain
    pairs = np.asarray(domain, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ConfigError("domain must be a DomainBox or ((lo, hi), ...) pairs")
    return DomainBox(pairs[:, 0], pairs[:, 1])


def runge(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + 25.0 * x * x)


def _runge_bound(order):
    # |d^k/dx^k 1/(1+25x^2)| peaks at 0 for even k with value k! 5^k
    return float(np.exp(gammaln(order + 1) + order * np.log(5.0)))


def _exp_bound(order):
    return float(np.e)


@dataclass
class StudyTarget:
    fn: object
    deriv_bound: object  # callable order -> bound

    def bound_for(self, N):
        return float(self.deriv_bound(2 * (N + 1)))


TARGETS = {
    "runge": StudyTarget(fn=runge, deriv_bound=_runge_bound),
    "exp": StudyTarget(fn=np.exp, deriv_bound=_exp_bound),
}


def conjecture_bound(x, nodes, N, deriv_bound, C):
    """C/(M!)^N * prod_k |x-x_k| * deriv_bound, via log-factorials so
    large M does not overflow; exactly 0 when x sits on a node."""
    nodes = nodes if isinstance(nodes, NodeSet) else NodeSet(nodes)
    x = np.asarray(x, dtype=float)
    pt = x.reshape(1, -1) if x.ndim == 1 and nodes.dim > 1 else np.atleast_1d(x).reshape(-1, 1)
    pt = as_points(pt, "x", dim=nodes.dim)
    deriv_bound = float(deriv_bound)
    C = float(C)
    N = int(N)
    if deriv_bound < 0:
        raise ConfigError("deriv_bound must be nonnegative")
    if C <= 0:
        raise ConfigError("C must be positive")
    if N < 1:
        raise ConfigError("N must be at least 1")
    d = pt[:, None, :] - nodes.points[None, :, :]
    r = np.sqrt(np.sum(d * d, axis=2))
    if np.any(r == 0.0, axis=1).all() and pt.shape[0] == 1:
        return 0.0
    logfact = float(gammaln(nodes.M + 1))
    out = np.where(
        np.any(r == 0.0, axis=1),
        0.0,
        C * deriv_bound * np.exp(np.sum(np.log(np.where(r > 0, r, 1.0)), axis=1)
                                 - N * logfact),
    )
    return float(out[0]) if out.size == 1 else out


def estimate_order(M_values, errors):
    """Least-squares slope of log(error) against log(M); returns
    (slope, r_squared). Needs at least two positive finite errors."""
    M = np.asarray(M_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = np.isfinite(e) & (e > 0) & np.isfinite(M) & (M > 0)
    if np.sum(keep) < 2:
        return float("nan"), float("nan")
    lx = np.log(M[keep])
    ly = np.log(e[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


@dataclass
class StudySpec:
    target: object  # name in TARGETS or a callable
    domain: DomainBox
    M_list: list
    N_list: list
    kernel: KernelSpec
    node_rule: str = "chebyshev"
    strategy: str = "square"
    grid_density: int = 2001
    seed: int = 0
    deriv_bound: object = None  # callable order -> bound, for callables
    optimize_iterations: int = 150

    def __post_init__(self):
        self.domain = _as_box(self.domain)
        for name in ("M_list", "N_list"):
            vals = [int(v) for v in getattr(self, name)]
            if not vals:
                raise ConfigError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigError(f"{name} must be strictly increasing")
            if vals[0] < 1:
                raise ConfigError(f"{name} entries must be positive")
            setattr(self, name, vals)
        if self.node_rule not in NODE_RULES:
            raise ConfigError(f"node_rule must be one of {NODE_RULES}")
        if isinstance(self.target, str):
            if self.target not in TARGETS:
                raise ConfigError(f"unknown target {self.target!r}; have {sorted(TARGETS)}")
            reg = TARGETS[self.target]
            self.target_fn = reg.fn
            self.bound_fn = reg.deriv_bound
        elif callable(self.target):
            self.target_fn = self.target
            self.bound_fn = self.deriv_bound if callable(self.deriv_bound) else (lambda order: 1.0)
        else:
            raise ConfigError("target must be a registry name or a callable")
        self.grid_density = int(self.grid_density)
        if self.grid_density < 2:
            raise ConfigError("grid_density must be at least 2")


def _call_target(fn, X):
    if X.shape[1] == 1:
        return np.asarray(fn(X[:, 0]), dtype=float)
    return np.asarray([float(fn(p)) for p in X], dtype=float)


def _axis_nodes(rule, M, lo, hi, domain, seed, iterations):
    if rule == "uniform":
        return np.linspace(lo, hi, M) if M > 1 else np.array([(lo + hi) / 2.0])
    return chebyshev_nodes(M, lo, hi)


def build_nodes(spec, M):
    """Node layout for one study row; tensor product above one dimension
    (M points per axis)."""
    box = spec.domain
    cols = [
        _axis_nodes(spec.node_rule, M, box.lower[i], box.upper[i], box,
                    spec.seed, spec.optimize_iterations)
        for i in range(box.dim)
    ]
    if box.dim == 1:
        pts = cols[0].reshape(-1, 1)
    else:
        mesh = np.meshgrid(*cols, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
    if spec.node_rule == "optimized":
        res = optimize_minmax(pts, box, iterations=spec.optimize_iterations,
                              seed=spec.seed)
        pts = res.points
    return pts


def build_scales(kernel, M, N):
    """Scale ladder for one study row, by kernel family: iterated-
    operator orders 1..N, shape parameters doubling from the kernel's
    base shape, or power exponents M-1, M-3, ... (largest last)."""
    fam = kernel.family
    if fam == "laplace_fundamental":
        return ScaleSet("laplace_orders", list(range(1, N + 1)))
    if fam == "power_distance":
        powers = [M - 1 - 2 * (N - 1 - j) for j in range(N)]
        if powers[0] < 1:
            raise ConfigError(f"power ladder needs M >= 2N, got M={M}, N={N}")
        return ScaleSet("powers", [float(p) for p in powers])
    base = kernel.shape
    if base is None or base <= 0:
        raise ConfigError("shape-parameter ladder needs a positive base shape")
    return ScaleSet("shape_params", [base * 2.0**j for j in range(N)])


@dataclass
class StudyRow:
    M: int
    N: int
    max_err: float
    rms_err: float
    cond: float
    fit_time: float
    ok: bool
    message: str = ""


@dataclass
class ConvergenceRecord:
    rows: list
    order: float
    r_squared: float
    conjecture_C: float
    conjecture_score: float
    spec: StudySpec = field(repr=False, default=None)


def run_convergence(spec):
    """Run the full (M, N) sweep; failed rows are recorded with NaN
    errors and the study continues."""
    grid = spec.domain.grid(spec.grid_density)
    tvals = _call_target(spec.target_fn, grid)
    rows = []
    shapes = []
    for M in spec.M_list:
        for N in spec.N_list:
            t0 = time.perf_counter()
            try:
                pts = build_nodes(spec, M)
                scales = build_scales(spec.kernel, M, N)
                nodes = NodeSet(pts)
                data = _call_target(spec.target_fn, pts)
                model = fit(nodes, scales, data, strategy=spec.strategy,
                            family=spec.kernel.family, kernel_n=spec.kernel.n)
                pred = evaluate(model, grid if spec.domain.dim > 1 else grid[:, 0])
                err = np.abs(np.atleast_1d(pred) - tvals)
                row = StudyRow(M=M, N=N, max_err=float(np.max(err)),
                               rms_err=float(np.sqrt(np.mean(err * err))),
                               cond=model.report.condition,
                               fit_time=time.perf_counter() - t0, ok=True)
                d = grid[:, None, :] - pts[None, :, :]
                r = np.sqrt(np.sum(d * d, axis=2))
                logw = np.sum(np.log(np.where(r > 0, r, 1.0)), axis=1)
                onnode = np.any(r == 0.0, axis=1)
                w = np.where(onnode, 0.0, np.exp(logw))
                bound = spec.bound_fn(2 * (N + 1))
                shape_row = bound * float(np.max(w)) * np.exp(-N * gammaln(nodes.M + 1))
                shapes.append((row.max_err, shape_row))
            except DfwaveError as exc:
                row = StudyRow(M=M, N=N, max_err=float("nan"),
                               rms_err=float("nan"), cond=float("nan"),
                               fit_time=time.perf_counter() - t0, ok=False,
                               message=str(exc))
            rows.append(row)
    ok_rows = [r for r in rows if r.ok]
    order, r2 = estimate_order([r.M for r in ok_rows], [r.max_err for r in ok_rows])
    if shapes:
        e = np.array([s[0] for s in shapes])
        s = np.array([s[1] for s in shapes])
        good = np.isfinite(e) & np.isfinite(s) & (s > 0)
        if good.any() and float(np.dot(s[good], s[good])) > 0:
            C = float(np.dot(e[good], s[good]) / np.dot(s[good], s[good]))
            resid = float(np.sqrt(np.sum((e[good] - C * s[good]) ** 2)
                                  / max(np.sum(e[good] ** 2), 1e-300)))
        else:
            C, resid = float("nan"), float("nan")
    else:
        C, resid = float("nan"), float("nan")
    return ConvergenceRecord(rows=rows, order=order, r_squared=r2,
                             conjecture_C=C, conjecture_score=resid, spec=spec)


@dataclass
class ErrorProfile:
    points: np.ndarray
    errors: np.ndarray
    band_mask: np.ndarray
    n_failures: int

    @property
    def band_max(self):
        vals = self.errors[self.band_mask]
        vals = vals[np.isfinite(vals)]
        return float(np.max(vals)) if vals.size else float("nan")

    @property
    def interior_median(self):
        vals = self.errors[~self.band_mask]
        vals = vals[np.isfinite(vals)]
        return float(np.median(vals)) if vals.size else float("nan")

    @property
    def max_error(self):
        vals = self.errors[np.isfinite(self.errors)]
        return float(np.max(vals)) if vals.size else float("nan")


def error_map(model, target, domain, grid_density, band_fraction=0.2):
    """Pointwise |model - target| on a dense tensor grid, with a mask for
    the boundary band (points within band_fraction of the nearest edge,
    per axis). Evaluation failures become NaN entries and are counted."""
    from .hermite import HermiteModel, evaluate_hermite

    domain = _as_box(domain)
    grid = domain.grid(int(grid_density))
    tvals = _call_target(target, grid)
    x = grid if domain.dim > 1 else grid[:, 0]
    if isinstance(model, HermiteModel):
        ev = lambda q: evaluate_hermite(model, q)
    else:
        ev = lambda q: evaluate(model, q)
    n_fail = 0
    try:
        pred = np.atleast_1d(ev(x))
    except DfwaveError:
        pred = np.full(grid.shape[0], np.nan)
        for i in range(grid.shape[0]):
            try:
                pred[i] = ev(x[i])
            except DfwaveError:
                n_fail += 1
    errors = np.abs(pred - tvals)
    frac = float(band_fraction)
    if not 0.0 < frac < 0.5:
        raise ConfigError("band_fraction must lie in (0, 0.5)")
    margin = np.minimum(grid - domain.lower[None, :], domain.upper[None, :] - grid)
    band = np.any(margin < frac * domain.width[None, :], axis=1)
    return ErrorProfile(points=grid, errors=errors, band_mask=band, n_failures=n_fail)
