"""Node placement tools: the product-of-distances error indicator, its
maximum over a box, Chebyshev layouts, a seeded min-max placement search,
and a power-iteration condition estimator for interpolation matrices.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .exceptions import ConfigError
from .validation import as_points

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class DomainBox:
    """Axis-aligned box given by lower/upper corner vectors."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ConfigError("box corners must be 1D vectors of equal length")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ConfigError("box corners must be finite")
        if not np.all(self.lower < self.upper):
            raise ConfigError("box requires lower < upper componentwise")

    @property
    def dim(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def axes(self, samples_per_axis):
        if samples_per_axis < 2:
            raise ConfigError("samples_per_axis must be >= 2")
        return [np.linspace(self.lower[i], self.upper[i], samples_per_axis) for i in range(self.dim)]

    def grid(self, samples_per_axis):
        """Tensor grid including endpoints, flattened row-major to (S, n)."""
        axes = self.axes(samples_per_axis)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _node_array(nodes):
    pts = getattr(nodes, "points", nodes)
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return as_points(pts, "nodes")


def omega(x, nodes):
    """Product of Euclidean distances from x to every node; zero iff x is
    a node."""
    nodes = _node_array(nodes)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != nodes.shape[1]:
        raise ConfigError(f"point has dimension {x.size}, nodes have {nodes.shape[1]}")
    d = np.sqrt(np.sum((nodes - x[None, :]) ** 2, axis=1))
    return float(np.prod(d))


def _omega_batch(P, nodes):
    d2 = np.sum((P[:, None, :] - nodes[None, :, :]) ** 2, axis=2)
    return np.prod(np.sqrt(d2), axis=1)


def chebyshev_nodes(M, a=-1.0, b=1.0):
    """The M Chebyshev points cos((2j-1)pi/(2M)) mapped to [a, b], sorted
    ascending."""
    M = int(M)
    if M < 1:
        raise ConfigError(f"M must be >= 1, got {M}")
    a = float(a)
    b = float(b)
    if not a < b:
        raise ConfigError(f"need a < b, got a={a}, b={b}")
    j = np.arange(1, M + 1)
    t = np.sort(np.cos((2 * j - 1) * np.pi / (2 * M)))
    return (a + b) / 2.0 + (b - a) / 2.0 * t


def _golden_polish(point, axis, lo, hi, nodes, steps=20):
    """Golden-section refinement of omega along one axis within [lo, hi]."""
    x = point.copy()
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)

    def val(t):
        x[axis] = t
        return omega(x, nodes)

    fc, fd = val(c), val(d)
    for _ in range(steps):
        if fc < fd:  # maximizing
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = val(d)
        else:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = val(c)
    best_t = c if fc >= fd else d
    best_v = max(fc, fd)
    x[axis] = best_t
    return x, best_v


def _default_samples(dim):
    return {1: 1001, 2: 101}.get(dim, 21)


def _max_omega_argmax(nodes, domain, samples_per_axis=None, polish_steps=20):
    nodes = _node_array(nodes)
    if nodes.shape[1] != domain.dim:
        raise ConfigError("node dimension does not match the domain box")
    sp_axis = _default_samples(domain.dim) if samples_per_axis is None else int(samples_per_axis)
    axes = domain.axes(sp_axis)
    P = domain.grid(sp_axis)
    vals = _omega_batch(P, nodes)
    i = int(np.argmax(vals))
    best = P[i].copy()
    best_val = float(vals[i])
    # local refinement inside the bracketing grid cell, one pass per axis
    idx = np.unravel_index(i, tuple(len(ax) for ax in axes))
    for axis in range(domain.dim):
        ax = axes[axis]
        j = idx[axis]
        lo = ax[max(j - 1, 0)]
        hi = ax[min(j + 1, len(ax) - 1)]
        if hi > lo:
            cand, v = _golden_polish(best, axis, lo, hi, nodes, steps=polish_steps)
            if v > best_val:
                best, best_val = cand, v
    return best_val, best


def max_omega(nodes, domain, samples_per_axis=None):
    """Maximum of omega over the box: deterministic tensor-grid scan with
    endpoints included, refined by golden-section steps per axis around
    the best grid cell. A lower bound on the true supremum."""
    val, _ = _max_omega_argmax(nodes, domain, samples_per_axis)
    return val


@dataclass
class OptimizeResult:
    points: np.ndarray
    max_omega: float
    trace: list = field(default_factory=list)


def optimize_minmax(initial, domain, iterations, seed=0, samples_per_axis=None, patience=60):
    """Coordinate-exchange search minimizing max omega over the box.

    Each iteration relocates the single node whose move most reduces the
    max; candidate positions per node are a line search from the node
    toward the reflection of the current maximizer through the box
    center, the maximizer itself, the box center, and seeded gaussian
    perturbations with decaying scale. Candidates are screened on a
    coarse grid (a multiplicative one-column update of the incumbent
    distance table), and only the screening winner is re-measured with
    the full grid-plus-polish evaluator, which also decides acceptance.
    The incumbent value never increases, the run is a pure function of
    (initial, seed), and it stops early after `patience` iterations
    without improvement.
    """
    pts = _node_array(initial).copy()
    if pts.shape[1] != domain.dim:
        raise ConfigError("node dimension does not match the domain box")
    for p in pts:
        if not domain.contains(p):
            raise ConfigError("initial nodes must lie inside the domain box")
    iterations = int(iterations)
    if iterations < 0:
        raise ConfigError("iterations must be >= 0")
    rng = np.random.default_rng(seed)
    M, dim = pts.shape
    center = (domain.lower + domain.upper) / 2.0
    width = float(np.max(domain.width))
    coarse = domain.grid({1: 201, 2: 41}.get(dim, 11))

    def value(p):
        return _max_omega_argmax(p, domain, samples_per_axis)

    cur_val, cur_max = value(pts)
    trace = [(0, cur_val)]
    stale = 0
    for it in range(1, iterations + 1):
        antipode = domain.lower + domain.upper - cur_max
        scale = 0.3 * width * 0.95 ** (it - 1)
        # fixed draw count per iteration keeps the run deterministic
        perturb = rng.normal(size=(M, 3, dim)) * scale
        D = np.sqrt(np.sum((coarse[:, None, :] - pts[None, :, :]) ** 2, axis=2))
        best_screen = np.inf
        best_move = None
        for k in range(M):
            others = np.delete(np.arange(M), k)
            prod_exc = np.prod(D[:, others], axis=1) if others.size else np.ones(len(coarse))
            node = pts[k]
            cands = [node + t * (antipode - node) for t in (0.25, 0.5, 0.75, 1.0)]
            cands.append(cur_max.copy())
            cands.append(center.copy())
            cands.extend(domain.clip(node + perturb[k, i]) for i in range(3))
            for cand in cands:
                if not domain.contains(cand):
                    continue
                if others.size and np.min(np.sum((pts[others] - cand[None, :]) ** 2, axis=1)) == 0.0:
                    continue  # keep nodes pairwise distinct
                dk = np.sqrt(np.sum((coarse - cand[None, :]) ** 2, axis=1))
                v = float(np.max(prod_exc * dk))
                if v < best_screen:
                    best_screen = v
                    best_move = (k, cand.copy())
        if best_move is not None:
            trial = pts.copy()
            trial[best_move[0]] = best_move[1]
            v_fine, v_max = value(trial)
            if v_fine < cur_val:
                pts, cur_val, cur_max = trial, v_fine, v_max
                stale = 0
            else:
                stale += 1
        else:
            stale += 1
        trace.append((it, cur_val))
        if stale >= patience:
            break
    return OptimizeResult(points=pts, max_omega=cur_val, trace=trace)


def condition_estimate(A, tol=1e-6, max_iter=20000):
    """2-norm condition estimate by power iteration on A^T A and inverse
    iteration through an LU factorization. Returns +inf when the smallest
    singular value falls below 1e-300 or the factorization breaks down.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"matrix must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ConfigError("matrix contains non-finite entries")
    n = A.shape[0]
    if n == 1:
        return 1.0 if A[0, 0] != 0.0 else np.inf
    v = 1.0 + 0.01 * np.arange(n)
    v /= np.linalg.norm(v)

    def dominant(applyop):
        vec = v.copy()
        lam = 0.0
        for _ in range(max_iter):
            w = applyop(vec)
            new = float(np.linalg.norm(w))
            if new == 0.0 or not np.isfinite(new):
                return new, vec
            vec = w / new
            if abs(new - lam) <= tol * new:
                return new, vec
            lam = new
        return lam, vec

    lam_max, _ = dominant(lambda x: A.T @ (A @ x))
    if lam_max == 0.0:
        return np.inf
    sigma_max = float(np.sqrt(lam_max))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # exact singularity is a handled outcome
            lu = lu_factor(A)
    except Exception:
        return np.inf
    udiag = np.abs(np.diag(lu[0]))
    if udiag.min() <= 1e-300 * max(udiag.max(), 1.0):
        return np.inf

    def inv_gram(x):
        # (A^T A)^{-1} x = A^{-1} A^{-T} x
        y = lu_solve(lu, x, trans=1)
        return lu_solve(lu, y, trans=0)

    lam_inv, _ = dominant(inv_gram)
    if not np.isfinite(lam_inv) or lam_inv <= 0.0:
        return np.inf
    sigma_min = float(1.0 / np.sqrt(lam_inv))
    if sigma_min < 1e-300:
        return np.inf
    return sigma_max / sigma_min
