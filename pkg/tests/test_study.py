import math

import numpy as np
import pytest

from dfwave.exceptions import ConfigError
from dfwave.kernels import KernelSpec
from dfwave.series import fit
from dfwave.study import (ConvergenceRecord, ErrorProfile, StudySpec,
                          build_nodes, build_scales, conjecture_bound,
                          error_map, estimate_order, run_convergence, runge)


MQ = KernelSpec(family="mq", n=1, shape=1.0)


def test_runge_values():
    assert runge(0.0) == 1.0
    assert abs(runge(1.0) - 1.0 / 26.0) <= 1e-16
    assert np.allclose(runge(np.array([0.0, 0.2])), [1.0, 0.5])


def test_conjecture_bound_values():
    nodes = np.array([[-1.0], [1.0]])
    # N=1, M=2, bound 1, C=1: |x-(-1)| |x-1| / 2! at 0 gives 1/2
    v = conjecture_bound(np.array([0.0]), nodes, 1, 1.0, 1.0)
    assert abs(v - 0.5) <= 1e-15
    # vanishes on the node set itself
    assert conjecture_bound(np.array([1.0]), nodes, 1, 1.0, 1.0) == 0.0
    # linear in both the derivative bound and the fitted constant
    assert abs(conjecture_bound(np.array([0.0]), nodes, 1, 2.0, 1.0) - 2.0 * v) <= 1e-15
    assert abs(conjecture_bound(np.array([0.0]), nodes, 1, 1.0, 3.0) - 3.0 * v) <= 1e-15
    with pytest.raises(ConfigError):
        conjecture_bound(np.array([0.0]), nodes, 0, 1.0, 1.0)
    with pytest.raises(ConfigError):
        conjecture_bound(np.array([0.0]), nodes, 1, -1.0, 1.0)
    with pytest.raises(ConfigError):
        conjecture_bound(np.array([0.0]), nodes, 1, 1.0, 0.0)


def test_estimate_order_planted_slope():
    M = np.array([4, 8, 16, 32])
    errs = 3.0 * M.astype(float) ** -2.0
    slope, r2 = estimate_order(M, errs)
    assert abs(slope + 2.0) <= 1e-12
    assert abs(r2 - 1.0) <= 1e-12
    slope, r2 = estimate_order(np.array([4]), np.array([0.1]))
    assert math.isnan(slope) and math.isnan(r2)
    # zero and nan errors are dropped rather than crashing the fit
    slope, _ = estimate_order(np.array([4, 8, 16]), np.array([0.4, np.nan, 0.1]))
    assert np.isfinite(slope)


def test_build_nodes_rules():
    spec = StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[5],
                     N_list=[1], kernel=MQ, node_rule="uniform")
    X = build_nodes(spec, 5)
    assert np.allclose(X[:, 0], np.linspace(-1, 1, 5))
    spec_c = StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[4],
                       N_list=[1], kernel=MQ, node_rule="chebyshev")
    Xc = build_nodes(spec_c, 4)
    ref = np.sort(np.cos((2 * np.arange(1, 5) - 1) * np.pi / 8.0))
    assert np.allclose(np.sort(Xc[:, 0]), ref)


def test_build_scales_kinds():
    lap = KernelSpec(family="laplace_fundamental", n=2, m=1)
    s = build_scales(lap, 9, 3)
    assert s.kind == "laplace_orders" and list(s.values) == [1, 2, 3]
    s = build_scales(MQ, 9, 3)
    assert s.kind == "shape_params" and np.allclose(s.values, [1.0, 2.0, 4.0])
    pw = KernelSpec(family="power_distance", n=1, power=3.0)
    s = build_scales(pw, 9, 3)
    # highest exponent M-1, stepping down by 2
    assert s.kind == "powers" and list(s.values) == [4.0, 6.0, 8.0]
    with pytest.raises(ConfigError):
        build_scales(pw, 5, 3)  # needs M >= 2N


def test_run_convergence_in_span_row():
    # a target inside the approximation space is reproduced to rounding
    spec = StudySpec(target=lambda x: np.sqrt(x * x + 1.0),
                     domain=((-1.0, 1.0),), M_list=[5], N_list=[1],
                     kernel=MQ, node_rule="uniform",
                     deriv_bound=lambda k: 1.0)
    rec = run_convergence(spec)
    assert isinstance(rec, ConvergenceRecord)
    row = rec.rows[0]
    assert row.ok and row.max_err <= 1e-9


def test_run_convergence_mq_runge_uniform_profile():
    spec = StudySpec(target="runge", domain=((-1.0, 1.0),),
                     M_list=[5, 9, 13, 17], N_list=[1], kernel=MQ,
                     node_rule="uniform")
    rec = run_convergence(spec)
    errs = [r.max_err for r in rec.rows]
    # frozen against an independent direct solve of the same interpolation
    # problem; these are recorded behavior, not theory
    assert np.allclose(errs, [0.31453330907633015, 0.12160321937312603,
                              0.10484755955286548, 0.10244783102983906],
                       rtol=1e-12)
    assert np.isfinite(rec.conjecture_C) and rec.conjecture_C > 0.0
    assert np.isfinite(rec.conjecture_score)
    assert all(r.ok for r in rec.rows)
    assert np.isfinite(rec.order)


def test_run_convergence_survives_row_failure():
    # the power ladder needs M >= 2N, so the M=3 row fails and is recorded
    # as NaN while the M=9 row still runs
    pw = KernelSpec(family="power_distance", n=1, power=3.0)
    spec = StudySpec(target="runge", domain=((-1.0, 1.0),),
                     M_list=[3, 10], N_list=[2], kernel=pw,
                     node_rule="uniform", strategy="greedy_multiscale")
    rec = run_convergence(spec)
    first, second = rec.rows
    assert not first.ok and math.isnan(first.max_err) and first.message
    assert second.ok


def test_study_spec_validation():
    with pytest.raises(ConfigError):
        StudySpec(target="nope", domain=((-1.0, 1.0),), M_list=[5],
                  N_list=[1], kernel=MQ)
    with pytest.raises(ConfigError):
        StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[5, 5],
                  N_list=[1], kernel=MQ)
    with pytest.raises(ConfigError):
        StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[5],
                  N_list=[1], kernel=MQ, node_rule="randomly")


def test_error_map_band_statistics():
    spec = StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[11],
                     N_list=[1], kernel=MQ, node_rule="uniform")
    X = build_nodes(spec, 11)
    scales = build_scales(MQ, 11, 1)
    data = runge(X[:, 0])
    model = fit(X, scales, data, family=MQ.family, kernel_n=MQ.n)
    prof = error_map(model, runge, ((-1.0, 1.0),), grid_density=2001)
    assert isinstance(prof, ErrorProfile)
    assert prof.n_failures == 0
    assert abs(prof.band_max - 0.11035378314951841) <= 1e-12
    assert abs(prof.interior_median - 0.02880764652750622) <= 1e-12
    # boundary band is where this family hurts
    assert prof.band_max > prof.interior_median
    assert prof.band_mask.any() and (~prof.band_mask).any()


def test_error_map_band_fraction_knob():
    spec = StudySpec(target="runge", domain=((-1.0, 1.0),), M_list=[7],
                     N_list=[1], kernel=MQ, node_rule="uniform")
    X = build_nodes(spec, 7)
    scales = build_scales(MQ, 7, 1)
    model = fit(X, scales, runge(X[:, 0]), family=MQ.family, kernel_n=MQ.n)
    wide = error_map(model, runge, ((-1.0, 1.0),), grid_density=501,
                     band_fraction=0.4)
    narrow = error_map(model, runge, ((-1.0, 1.0),), grid_density=501,
                       band_fraction=0.1)
    assert wide.band_mask.sum() > narrow.band_mask.sum()
    with pytest.raises(ConfigError):
        error_map(model, runge, ((-1.0, 1.0),), 501, band_fraction=0.6)
