"""Batch experiment runner: dfwave CONFIG [--set SECTION.KEY=VALUE ...]

Each invocation runs one command named in the config's [run] section,
computes everything in memory, then writes its output files, so a
failing run leaves no partial outputs. Exit codes: 0 success, 2 config
error, 3 numerical failure, 4 file-format or write error.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import load_config
from .distances import AnisotropyTensor, euclidean
from .exceptions import (ConfigError, ConvergenceError, IOFormatError,
                         PoleError, SingularError)
from .hermite import BoundarySpec, assemble_hermite, edge_effect_ratio, fit_hermite, evaluate_hermite
from .io import (read_boundary, read_grid, read_model, read_points, read_radial,
                 read_tensor, write_csv, write_grid, write_model, write_points,
                 write_radial)
from .kernels import KernelSpec, eval_kernel
from .nodes import DomainBox, max_omega, optimize_minmax
from .series import (DfwModel, NodeSet, ScaleSet, evaluate, evaluate_rational,
                     fit)
from .study import TARGETS, StudySpec, error_map, run_convergence
from .svgplot import emit_plot
from .transforms import (GridFunction, RadialQuadratureSpec, abel_backward,
                         abel_forward, fractional_laplacian,
                         laplace_potential_dfw, poisson_extension, radon_dfw,
                         riesz_potential, weyl_transform)


def _comments(cfg):
    return [f"dfwave {__version__}"] + cfg.resolved_items()


def _kernel_from(cfg, default_n=None):
    family = cfg.require("kernel", "family")
    n = cfg.getint("kernel", "n", default_n if default_n is not None else 1)
    kwargs = {}
    m = cfg.getint("kernel", "m")
    if m is not None:
        kwargs["m"] = m
    shape = cfg.getfloat("kernel", "shape")
    if shape is not None:
        kwargs["shape"] = shape
    power = cfg.getfloat("kernel", "power")
    if power is not None:
        kwargs["power"] = power
    tensor = cfg.get("kernel", "tensor")
    if tensor is not None:
        kwargs["anisotropy"] = AnisotropyTensor(read_tensor(tensor))
    return KernelSpec(family=family, n=n, **kwargs)


def _scales_from(cfg):
    kind = cfg.require("scales", "kind")
    values = cfg.getfloats("scales", "values")
    if values is None:
        raise ConfigError("[scales] values is required")
    return ScaleSet(kind, values)


def _target_from(cfg):
    name = cfg.require("study", "target")
    if name not in TARGETS:
        raise ConfigError(f"unknown study target {name!r}; have {sorted(TARGETS)}")
    return TARGETS[name].fn


def _out(cfg, name):
    return os.path.join(cfg.output_dir, name)


def cmd_kernel_eval(cfg):
    pts = read_points(cfg.require("input", "points"))
    if pts.shape[1] % 2 != 0:
        raise IOFormatError("kernel-eval points need 2n columns (x, y per row)")
    n = pts.shape[1] // 2
    spec = _kernel_from(cfg, default_n=n)
    rows = []
    for row in pts:
        x, y = row[:n], row[n:]
        rows.append((euclidean(x, y), float(eval_kernel(spec, x, y))))
    return [(_out(cfg, "kernel_eval.csv"),
             lambda p: write_csv(p, ("r", "value"), rows, _comments(cfg)))]


def cmd_fit(cfg):
    pts = read_points(cfg.require("input", "points"))
    vals = read_points(cfg.require("input", "values")).ravel()
    scales = _scales_from(cfg)
    kernel = _kernel_from(cfg, default_n=pts.shape[1])
    strategy = cfg.get("fit", "strategy", "square")
    model = fit(NodeSet(pts), scales, vals, strategy=strategy,
                family=kernel.family, kernel_n=kernel.n)
    rep = model.report
    rows = [(rep.strategy, rep.residual_max, rep.condition, rep.warning)]
    return [
        (_out(cfg, "model.txt"), lambda p: write_model(p, model)),
        (_out(cfg, "fit_report.csv"),
         lambda p: write_csv(p, ("strategy", "residual_max", "condition", "warning"),
                             rows, _comments(cfg))),
    ]


def cmd_evaluate(cfg):
    model = read_model(cfg.require("input", "model"))
    pts = read_points(cfg.require("input", "points"))
    if isinstance(model, DfwModel):
        vals = evaluate(model, pts if pts.shape[1] > 1 else pts[:, 0])
    else:
        vals = evaluate_rational(model, pts if pts.shape[1] > 1 else pts[:, 0])
    cols = tuple(f"x{i}" for i in range(pts.shape[1])) + ("value",)
    rows = [tuple(row) + (float(v),) for row, v in zip(pts, np.atleast_1d(vals))]
    return [(_out(cfg, "evaluate.csv"),
             lambda p: write_csv(p, cols, rows, _comments(cfg)))]


def cmd_hermite(cfg):
    target = _target_from(cfg)
    interior = read_points(cfg.require("input", "interior"))
    bpts, bnorm = read_boundary(cfg.require("input", "boundary"))
    layout = BoundarySpec(interior=interior, boundary=bpts, normals=bnorm)
    kernel = _kernel_from(cfg, default_n=layout.dim)
    h = cfg.getfloat("hermite", "fd_step", 1e-6)

    def tv(X):
        if layout.dim == 1:
            return np.asarray([float(target(float(p[0]))) for p in X])
        return np.asarray([float(target(p)) for p in X])

    fi = tv(layout.interior.points)
    fd = tv(layout.boundary.points)
    fn = np.array([
        (tv((layout.boundary.points[i] + h * layout.normals[i]).reshape(1, -1))[0]
         - tv((layout.boundary.points[i] - h * layout.normals[i]).reshape(1, -1))[0])
        / (2.0 * h)
        for i in range(layout.L)
    ])
    model = fit_hermite(layout, kernel, fi, fd, fn)
    _, defect = assemble_hermite(layout, kernel)
    allpts = np.vstack([layout.interior.points, layout.boundary.points])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    density = cfg.getint("study", "samples", 501)
    box = DomainBox(lo, hi)
    grid = box.grid(density)
    pred = np.atleast_1d(evaluate_hermite(model, grid if layout.dim > 1 else grid[:, 0]))
    tgt = tv(grid)
    cols = tuple(f"x{i}" for i in range(layout.dim)) + ("predicted", "target", "abs_err")
    rows = [tuple(g) + (float(p), float(t), float(abs(p - t)))
            for g, p, t in zip(grid, pred, tgt)]
    comments = _comments(cfg) + [
        f"condition = {model.condition:.17g}",
        f"residual_max = {model.residual_max:.17g}",
        f"symmetry_defect = {defect:.17g}",
    ]
    return [(_out(cfg, "hermite.csv"), lambda p: write_csv(p, cols, rows, comments))]


def _mollified_ball(width=1e-3):
    def f(pts):
        r = np.sqrt(np.sum(pts * pts, axis=1))
        t = (r - (1.0 - width)) / width
        out = np.ones(len(pts))
        out[t >= 1.0] = 0.0
        mid = (t > 0.0) & (t < 1.0)
        tm = t[mid]
        out[mid] = 1.0 - (10.0 * tm**3 - 15.0 * tm**4 + 6.0 * tm**5)
        return out

    return f


def cmd_transform(cfg):
    op = cfg.require("transform", "op")
    if op in ("fractional_laplacian", "riesz", "poisson_extension"):
        gf = read_grid(cfg.require("input", "grid"))
        if op == "fractional_laplacian":
            out = fractional_laplacian(gf, cfg.getfloat("transform", "y", 1.0))
        elif op == "riesz":
            out = riesz_potential(gf, cfg.getfloat("transform", "s", 1.0),
                                  method=cfg.get("transform", "method", "spectral"))
        else:
            out = poisson_extension(gf, cfg.getfloat("transform", "q", 1.0))
        return [(_out(cfg, "transform_out.grid.txt"), lambda p: write_grid(p, out))]
    if op in ("abel_forward", "abel_backward"):
        rs = read_radial(cfg.require("input", "radial"))
        beta = cfg.getfloat("transform", "beta", 0.5)
        out = abel_forward(rs, beta) if op == "abel_forward" else abel_backward(rs, beta)
        return [(_out(cfg, "transform_out.radial.txt"), lambda p: write_radial(p, out))]
    if op in ("weyl", "radon", "laplace_potential"):
        n = cfg.getint("transform", "n", 3)
        sr = cfg.getfloat("transform", "support_radius")
        if sr is None:
            raise ConfigError("[transform] support_radius is required for radial transforms")
        bp = cfg.getfloats("transform", "breakpoints")
        quad = RadialQuadratureSpec(
            support_radius=sr,
            n_radial=cfg.getint("transform", "n_radial", 64),
            n_angular=cfg.getint("transform", "n_angular", 128),
            n_polar=cfg.getint("transform", "n_polar", 64),
            breakpoints=tuple(bp) if bp else None,
        )
        center = cfg.getfloats("transform", "center", [0.0] * n)
        gamma = cfg.getfloat("transform", "gamma", 0.0)
        f = _mollified_ball()
        xi = np.asarray(center, dtype=float)
        if op == "weyl":
            val = weyl_transform(f, xi, gamma, n, quad)
        elif op == "radon":
            val = radon_dfw(f, xi, gamma, n, quad)
        else:
            val = laplace_potential_dfw(f, xi, n, quad)
        rows = [(op, float(gamma), float(val))]
        return [(_out(cfg, "transform.csv"),
                 lambda p: write_csv(p, ("op", "gamma", "value"), rows, _comments(cfg)))]
    raise ConfigError(f"unknown transform op {op!r}")


def cmd_nodes_optimize(cfg):
    lower = cfg.getfloats("nodes", "lower")
    upper = cfg.getfloats("nodes", "upper")
    if lower is None or upper is None:
        raise ConfigError("[nodes] lower and upper are required")
    box = DomainBox(np.asarray(lower), np.asarray(upper))
    start_path = cfg.get("input", "start")
    if start_path is not None:
        start = read_points(start_path)
    else:
        count = cfg.getint("nodes", "count")
        if count is None:
            raise ConfigError("[nodes] count or [input] start is required")
        if box.dim != 1:
            raise ConfigError("generated uniform starts are one-dimensional; "
                              "provide [input] start for higher dimensions")
        start = np.linspace(lower[0], upper[0], count).reshape(-1, 1)
    iterations = cfg.getint("nodes", "iterations", 200)
    spa = cfg.getint("nodes", "samples_per_axis")
    res = optimize_minmax(start, box, iterations=iterations, seed=cfg.seed,
                          samples_per_axis=spa)
    before = max_omega(start, box, samples_per_axis=spa)
    comments = _comments(cfg) + [
        f"start_max_omega = {before:.17g}",
        f"final_max_omega = {res.max_omega:.17g}",
    ]
    cols = tuple(f"x{i}" for i in range(box.dim))
    rows = [tuple(float(c) for c in row) for row in res.points]
    return [(_out(cfg, "nodes.csv"), lambda p: write_csv(p, cols, rows, comments))]


def cmd_study_converge(cfg):
    kernel = _kernel_from(cfg)
    lower = cfg.getfloats("study", "lower", [-1.0])
    upper = cfg.getfloats("study", "upper", [1.0])
    box = DomainBox(np.asarray(lower), np.asarray(upper))
    spec = StudySpec(
        target=cfg.require("study", "target"),
        domain=box,
        M_list=cfg.getints("study", "m_list", [5, 9, 13, 17]),
        N_list=cfg.getints("study", "n_list", [1]),
        kernel=kernel,
        node_rule=cfg.get("study", "node_rule", "chebyshev"),
        strategy=cfg.get("study", "strategy", "square"),
        grid_density=cfg.getint("study", "grid_density", 2001),
        seed=cfg.seed,
    )
    record = run_convergence(spec)
    cols = ("M", "N", "max_err", "rms_err", "cond", "order_row_flag")
    rows = []
    for r in record.rows:
        used = r.ok and np.isfinite(r.max_err) and r.max_err > 0
        rows.append((r.M, r.N, r.max_err, r.rms_err, r.cond, 1 if used else 0))
    comments = _comments(cfg) + [
        f"order = {record.order:.17g}",
        f"r_squared = {record.r_squared:.17g}",
        f"conjecture_C = {record.conjecture_C:.17g}",
        f"conjecture_score = {record.conjecture_score:.17g}",
    ]
    writes = [(_out(cfg, "convergence.csv"),
               lambda p: write_csv(p, cols, rows, comments))]
    emap = cfg.getint("study", "error_map_m")
    if emap is not None:
        from .study import build_nodes, build_scales

        pts = build_nodes(spec, emap)
        scales = build_scales(kernel, emap, spec.N_list[-1])
        data = spec.target_fn(pts[:, 0]) if box.dim == 1 else np.asarray(
            [float(spec.target_fn(p)) for p in pts])
        model = fit(NodeSet(pts), scales, np.asarray(data, dtype=float),
                    strategy=spec.strategy, family=kernel.family, kernel_n=kernel.n)
        prof = error_map(model, spec.target_fn, box, spec.grid_density)
        fcols = tuple(f"x{i}" for i in range(box.dim)) + ("error",)
        frows = [tuple(float(c) for c in p) + (float(e),)
                 for p, e in zip(prof.points, prof.errors)]
        fcomments = _comments(cfg) + [
            f"band_max = {prof.band_max:.17g}",
            f"interior_median = {prof.interior_median:.17g}",
            f"failures = {prof.n_failures}",
        ]
        writes.append((_out(cfg, "errorfield.csv"),
                       lambda p: write_csv(p, fcols, frows, fcomments)))
    if "plot" in cfg.sections:
        xcol = cfg.get("plot", "x", "M")
        ycol = cfg.get("plot", "y", "max_err")
        svg = cfg.get("plot", "output", "convergence.svg")
        logx = cfg.getbool("plot", "logx", False)
        logy = cfg.getbool("plot", "logy", False)
        writes.append((_out(cfg, svg),
                       lambda p: emit_plot(_out(cfg, "convergence.csv"),
                                           (xcol, ycol), p, logx=logx, logy=logy)))
    return writes


def cmd_study_edge(cfg):
    target = _target_from(cfg)
    lower = cfg.getfloats("study", "lower", [-1.0])
    upper = cfg.getfloats("study", "upper", [1.0])
    if len(lower) != 1 or len(upper) != 1:
        raise ConfigError("study-edge runs on one-dimensional domains")
    lo, hi = lower[0], upper[0]
    count = cfg.getint("study", "interior_count", 9)
    interior = np.linspace(lo, hi, count + 2)[1:-1]
    layout = BoundarySpec(interior=interior, boundary=np.array([lo, hi]),
                          normals=np.array([-1.0, 1.0]))
    kernel = _kernel_from(cfg, default_n=1)
    band = cfg.getfloat("study", "band_width")
    if band is None:
        raise ConfigError("[study] band_width is required for study-edge")
    samples = cfg.getint("study", "samples", 2001)
    h = cfg.getfloat("hermite", "fd_step", 1e-6)
    res = edge_effect_ratio(target, layout, kernel, band, samples=samples, fd_step=h)
    head = [("ratio", "plain_band_rms", "hermite_band_rms")]
    rows = [(res.ratio, res.plain_band_rms, res.hermite_band_rms)]
    fcols = ("x", "plain_err", "hermite_err")
    frows = [(float(p[0]), float(a), float(b))
             for p, a, b in zip(res.points, res.plain_error, res.hermite_error)]
    return [
        (_out(cfg, "edge.csv"),
         lambda p: write_csv(p, head[0], rows, _comments(cfg))),
        (_out(cfg, "edge_field.csv"),
         lambda p: write_csv(p, fcols, frows, _comments(cfg))),
    ]


_DISPATCH = {
    "kernel-eval": cmd_kernel_eval,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "hermite": cmd_hermite,
    "transform": cmd_transform,
    "nodes-optimize": cmd_nodes_optimize,
    "study-converge": cmd_study_converge,
    "study-edge": cmd_study_edge,
}


def run(cfg):
    writes = _DISPATCH[cfg.command](cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    for path, writer in writes:
        writer(path)
    return [path for path, _ in writes]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dfwave",
        description="Batch runner for distance-function-wavelet experiments.")
    parser.add_argument("config", help="experiment config file (INI sections)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override a config entry (repeatable)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=args.overrides)
        run(cfg)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SingularError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if exc.condition is not None:
            print(f"condition estimate: {exc.condition:.6e}", file=sys.stderr)
        return 3
    except (PoleError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except IOFormatError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
