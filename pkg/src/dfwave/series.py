"""Multiscale distance-kernel expansions: column assembly, three fitting
strategies, evaluation, and the rational (quotient) variant.

A model is a constant offset a0 (plus an optional user-supplied offset
function handle f0) and a coefficient matrix over (scale, node):

    f(x) ~ a0 + f0(x) + sum_m sum_k alpha[m, k] * phi_m(|x - x_k|)

Scale kinds map onto kernel families: laplace_orders -> polyharmonic
order m per scale, shape_params -> shape parameter per scale for the
mq-type and gaussian families, powers -> exponent per scale. There is
deliberately no polynomial tail beyond the constant offset.
"""

from dataclasses import dataclass, field

import numpy as np

from .distances import pairwise_euclidean
from .exceptions import ConfigError, PoleError, SingularError
from .kernels import KernelSpec, normalize_family, radial_profile
from .nodes import condition_estimate
from .validation import as_points, as_values

SCALE_KINDS = ("laplace_orders", "shape_params", "powers")

_KIND_FAMILIES = {
    "laplace_orders": ("laplace_fundamental",),
    "shape_params": ("mq", "inverse_mq", "gaussian", "mq_tps", "poisson_kernel"),
    "powers": ("power_distance",),
}
_DEFAULT_FAMILY = {
    "laplace_orders": "laplace_fundamental",
    "shape_params": "mq",
    "powers": "power_distance",
}

COND_HARD_LIMIT = 1e14
COND_WARN_LIMIT = 1e10

STRATEGIES = ("square", "least_squares", "greedy_multiscale")


class NodeSet:
    """Ordered list of M pairwise-distinct points in n dimensions."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        self.points = as_points(pts, "nodes")
        diff = self.points[:, None, :] - self.points[None, :, :]
        d2 = np.sum(diff * diff, axis=2)
        np.fill_diagonal(d2, np.inf)
        if self.M > 1 and float(np.min(d2)) == 0.0:
            raise ConfigError("nodes must be pairwise distinct")

    @property
    def M(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def translated(self, shift):
        return NodeSet(self.points + np.asarray(shift, dtype=float)[None, :])


class ScaleSet:
    """Scale axis of an expansion: a kind tag plus strictly increasing
    values (polyharmonic orders start at 1 so every profile is bounded at
    the origin)."""

    def __init__(self, kind, values):
        kind = str(kind).strip().lower()
        if kind not in SCALE_KINDS:
            raise ConfigError(f"unknown scale kind {kind!r}; expected one of {SCALE_KINDS}")
        vals = np.atleast_1d(np.asarray(values, dtype=float))
        if vals.ndim != 1 or vals.size < 1 or not np.all(np.isfinite(vals)):
            raise ConfigError("scale values must be a nonempty finite 1D list")
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise ConfigError("scale values must be strictly increasing")
        if kind == "laplace_orders":
            if not np.all(vals == np.round(vals)) or vals[0] < 1:
                raise ConfigError("laplace orders must be integers starting at m >= 1")
        self.kind = kind
        self.values = vals

    @property
    def N(self):
        return self.values.size

    def kernel_spec(self, j, family=None, kernel_n=1):
        """KernelSpec for scale index j."""
        family = _DEFAULT_FAMILY[self.kind] if family is None else normalize_family(family)
        if family not in _KIND_FAMILIES[self.kind]:
            raise ConfigError(f"family {family!r} is not usable with scale kind {self.kind!r}")
        v = self.values[j]
        if self.kind == "laplace_orders":
            return KernelSpec(family, n=kernel_n, m=int(v))
        if self.kind == "powers":
            return KernelSpec(family, power=v)
        return KernelSpec(family, n=kernel_n, shape=v)


@dataclass
class FitReport:
    strategy: str
    residual_max: float
    condition: float
    warning: bool = False


@dataclass
class DfwModel:
    scales: ScaleSet
    nodes: NodeSet
    coeffs: np.ndarray  # (N, M)
    a0: float = 0.0
    f0: object = None  # optional callable offset, not serializable
    family: str | None = None
    kernel_n: int = 1
    report: FitReport | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.scales.N, self.nodes.M):
            raise ConfigError(
                f"coefficient matrix shape {self.coeffs.shape} does not match "
                f"(scales, nodes) = ({self.scales.N}, {self.nodes.M})"
            )
        if not np.all(np.isfinite(self.coeffs)) or not np.isfinite(self.a0):
            raise ConfigError("model coefficients must be finite")
        if self.family is None:
            self.family = _DEFAULT_FAMILY[self.scales.kind]


def _as_nodeset(nodes):
    return nodes if isinstance(nodes, NodeSet) else NodeSet(nodes)


def assemble(nodes, scales, kernel_n, eval_points, family=None):
    """Column matrix of the expansion at the evaluation points.

    Column 0 is the constant offset (all ones); remaining columns are
    ordered scale-major then node-major. Shape (M', 1 + N*M).
    """
    nodes = _as_nodeset(nodes)
    ev = _as_nodeset(eval_points)
    if ev.dim != nodes.dim:
        raise ConfigError(f"eval points dimension {ev.dim} != node dimension {nodes.dim}")
    R = pairwise_euclidean(ev.points, nodes.points)
    cols = [np.ones((ev.M, 1))]
    for j in range(scales.N):
        spec = scales.kernel_spec(j, family=family, kernel_n=kernel_n)
        cols.append(radial_profile(spec, R))
    return np.hstack(cols)


def _check_condition(K, context):
    cond = condition_estimate(K)
    if not np.isfinite(cond) or cond > COND_HARD_LIMIT:
        raise SingularError(
            f"{context}: condition estimate {cond:.3e} exceeds {COND_HARD_LIMIT:.0e}",
            condition=cond,
        )
    return cond


def fit(nodes, scales, data, eval_points=None, strategy="square", family=None, kernel_n=None):
    """Fit expansion coefficients to data sampled at eval_points.

    square     : exact solve; needs 1 + N*M = M' columns-with-offset, or
                 N*M = M' with the offset column dropped (a0 = 0).
    least_squares : minimum-norm least squares; needs M' >= 1 + N*M.
    greedy_multiscale : a0 = mean(data), then one exact square solve per
                 scale on the running residual; needs M' = M.
    """
    nodes = _as_nodeset(nodes)
    ev = nodes if eval_points is None else _as_nodeset(eval_points)
    data = as_values(data, "data", length=ev.M)
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    kernel_n = nodes.dim if kernel_n is None else int(kernel_n)
    N, M, Mp = scales.N, nodes.M, ev.M
    A = assemble(nodes, scales, kernel_n, ev, family=family)

    if strategy == "square":
        if Mp == 1 + N * M:
            K = A
            offset = True
        elif Mp == N * M:
            K = A[:, 1:]
            offset = False
        else:
            raise ConfigError(
                f"square strategy needs 1 + N*M = M' or N*M = M'; got N*M = {N * M}, M' = {Mp}"
            )
        cond = _check_condition(K, "square fit")
        sol = np.linalg.solve(K, data)
        a0 = float(sol[0]) if offset else 0.0
        coef = (sol[1:] if offset else sol).reshape(N, M)
    elif strategy == "least_squares":
        if Mp < 1 + N * M:
            raise ConfigError(
                f"least_squares needs M' >= 1 + N*M; got M' = {Mp}, 1 + N*M = {1 + N * M}"
            )
        sol, _, _, sv = np.linalg.lstsq(A, data, rcond=None)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 1e-300 else np.inf
        if not np.isfinite(cond) or cond > COND_HARD_LIMIT:
            raise SingularError(
                f"least squares fit: condition estimate {cond:.3e} exceeds {COND_HARD_LIMIT:.0e}",
                condition=cond,
            )
        a0 = float(sol[0])
        coef = sol[1:].reshape(N, M)
    else:  # greedy_multiscale
        if Mp != M:
            raise ConfigError(f"greedy_multiscale needs M' = M; got M' = {Mp}, M = {M}")
        a0 = float(np.mean(data))
        resid = data - a0
        coef = np.empty((N, M))
        cond = 1.0
        for j in range(N):
            K = A[:, 1 + j * M : 1 + (j + 1) * M]
            cond = max(cond, _check_condition(K, f"greedy scale {j}"))
            coef[j] = np.linalg.solve(K, resid)
            resid = resid - K @ coef[j]

    flat = np.concatenate(([a0], coef.ravel()))
    residual_max = float(np.max(np.abs(A @ flat - data)))
    report = FitReport(
        strategy=strategy,
        residual_max=residual_max,
        condition=float(cond),
        warning=bool(cond > COND_WARN_LIMIT),
    )
    return DfwModel(
        scales=scales,
        nodes=nodes,
        coeffs=coef,
        a0=a0,
        family=normalize_family(family) if family else None,
        kernel_n=kernel_n,
        report=report,
    )


def _points_for(x, dim):
    """Normalize x to a (k, dim) batch; report whether it was a single point."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0 or (arr.ndim == 1 and dim > 1)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim > 1 else arr.reshape(-1, 1)
    return as_points(arr, "x", dim=dim), scalar


def evaluate(model, x):
    """a0 + f0(x) + sum of weighted kernel translates at x.

    x may be a single point (returns float) or a (k, n) batch.
    """
    X, scalar = _points_for(x, model.nodes.dim)
    R = pairwise_euclidean(X, model.nodes.points)
    out = np.full(X.shape[0], model.a0)
    for j in range(model.scales.N):
        spec = model.scales.kernel_spec(j, family=model.family, kernel_n=model.kernel_n)
        out += radial_profile(spec, R) @ model.coeffs[j]
    if model.f0 is not None:
        extra = np.asarray([float(model.f0(p if model.nodes.dim > 1 else p[0])) for p in X])
        out += extra
    return float(out[0]) if scalar else out


@dataclass
class RationalDfwModel:
    """Quotient of two expansions; the denominator offset is pinned to 1."""

    numerator: DfwModel
    denominator: DfwModel
    pole_risk: float = 0.0
    report: FitReport | None = None

    def __post_init__(self):
        if self.denominator.a0 != 1.0:
            raise ConfigError("denominator offset must equal 1 exactly")


def fit_rational(nodes_num, scales_num, nodes_den, scales_den, x, f, kernel_n=None, family=None):
    """Fit numerator and denominator coefficients via the linearized
    system f_i * den(x_i) = num(x_i) in minimum-norm least squares.

    Returns the model with a pole-risk diagnostic: the largest observed
    |den(x_i) - 1| over the sample points. Rank deficiency is resolved by
    the minimum-norm rule rather than rejected (numerator and denominator
    columns coincide for shared layouts, so exact deficiency is routine).
    """
    nodes_num = _as_nodeset(nodes_num)
    nodes_den = _as_nodeset(nodes_den)
    X = _as_nodeset(x)
    fvals = as_values(f, "f", length=X.M)
    kernel_n = X.dim if kernel_n is None else int(kernel_n)
    n_unknowns = 1 + scales_num.N * nodes_num.M + scales_den.N * nodes_den.M
    if X.M < n_unknowns:
        raise ConfigError(
            f"need at least {n_unknowns} samples for {n_unknowns} unknowns, got {X.M}"
        )
    A_num = assemble(nodes_num, scales_num, kernel_n, X, family=family)
    A_den = assemble(nodes_den, scales_den, kernel_n, X, family=family)[:, 1:]
    A = np.hstack([A_num, -fvals[:, None] * A_den])
    sol, _, _, sv = np.linalg.lstsq(A, fvals, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 1e-300 else np.inf
    k_num = 1 + scales_num.N * nodes_num.M
    num = DfwModel(
        scales=scales_num,
        nodes=nodes_num,
        coeffs=sol[1:k_num].reshape(scales_num.N, nodes_num.M),
        a0=float(sol[0]),
        family=normalize_family(family) if family else None,
        kernel_n=kernel_n,
    )
    den = DfwModel(
        scales=scales_den,
        nodes=nodes_den,
        coeffs=sol[k_num:].reshape(scales_den.N, nodes_den.M),
        a0=1.0,
        family=normalize_family(family) if family else None,
        kernel_n=kernel_n,
    )
    den_at_samples = np.atleast_1d(evaluate(den, X.points))
    pole_risk = float(np.max(np.abs(den_at_samples - 1.0)))
    residual_max = float(np.max(np.abs(A @ sol - fvals)))
    report = FitReport(strategy="least_squares", residual_max=residual_max, condition=cond,
                       warning=bool(not np.isfinite(cond) or cond > COND_WARN_LIMIT))
    return RationalDfwModel(numerator=num, denominator=den, pole_risk=pole_risk, report=report)


POLE_TOLERANCE = 1e-10


def evaluate_rational(model, x):
    """num(x)/den(x); raises PoleError where |den| < 1e-10."""
    X, scalar = _points_for(x, model.numerator.nodes.dim)
    num = np.atleast_1d(evaluate(model.numerator, X))
    den = np.atleast_1d(evaluate(model.denominator, X))
    bad = np.abs(den) < POLE_TOLERANCE
    if bad.any():
        raise PoleError(
            f"denominator magnitude below {POLE_TOLERANCE} near {X[int(np.argmax(bad))]}"
        )
    out = num / den
    return float(out[0]) if scalar else out
