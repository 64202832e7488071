import numpy as np
import pytest

from dfwave.exceptions import ConfigError, PoleError, SingularError
from dfwave.nodes import chebyshev_nodes
from dfwave.series import (DfwModel, NodeSet, ScaleSet, assemble, evaluate,
                           evaluate_rational, fit, fit_rational)


def test_nodeset_validation():
    ns = NodeSet([0.0, 0.5, 1.0])
    assert ns.M == 3 and ns.dim == 1
    with pytest.raises(ConfigError):
        NodeSet([0.0, 0.0, 1.0])
    with pytest.raises(ConfigError):
        NodeSet(np.zeros((0, 1)))


def test_scaleset_validation():
    s = ScaleSet("shape_params", [0.5, 1.0, 2.0])
    assert s.N == 3
    with pytest.raises(ConfigError):
        ScaleSet("shape_params", [1.0, 1.0])  # not strictly increasing
    with pytest.raises(ConfigError):
        ScaleSet("laplace_orders", [0, 1])
    with pytest.raises(ConfigError):
        ScaleSet("unknown_kind", [1.0])


def test_assembly_layout():
    nodes = NodeSet([0.0, 1.0])
    scales = ScaleSet("powers", [1.0])
    A = assemble(nodes, scales, 1, NodeSet([0.0, 1.0]))
    # offset column, then |x - x_k| columns
    assert A.shape == (2, 3)
    assert np.allclose(A, [[1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


def test_square_fit_reproduces_nodes():
    rng = np.random.default_rng(2)
    x = chebyshev_nodes(9, -1.0, 1.0)
    data = np.sin(2.0 * x) + 0.1 * rng.normal(size=9)
    scales = ScaleSet("shape_params", [1.0])
    model = fit(NodeSet(x), scales, data, family="mq", kernel_n=1)
    pred = evaluate(model, x)
    scale = np.max(np.abs(data))
    assert np.max(np.abs(pred - data)) <= 1e-8 * scale
    assert model.report.residual_max <= 1e-8 * scale


def test_each_family_reproduces_node_data():
    rng = np.random.default_rng(4)
    x = chebyshev_nodes(8, -1.0, 1.0)
    data = 1.0 / (1.0 + 4.0 * x * x)
    cases = [
        ("mq", ScaleSet("shape_params", [0.8])),
        ("inverse_mq", ScaleSet("shape_params", [0.8])),
        ("gaussian", ScaleSet("shape_params", [1.1])),
        ("laplace_fundamental", ScaleSet("laplace_orders", [1])),
        ("power_distance", ScaleSet("powers", [3.0])),
        ("poisson_kernel", ScaleSet("shape_params", [0.9])),
        ("mq_tps", ScaleSet("shape_params", [0.8])),
    ]
    for family, scales in cases:
        kn = 2 if family == "mq_tps" else 1
        model = fit(NodeSet(x), scales, data, family=family, kernel_n=kn)
        pred = evaluate(model, x)
        assert np.max(np.abs(pred - data)) <= 1e-8 * np.max(np.abs(data)), family


def test_translation_equivariance_of_coefficients():
    x = chebyshev_nodes(7, -1.0, 1.0)
    data = np.exp(x)
    scales = ScaleSet("shape_params", [0.9])
    m1 = fit(NodeSet(x), scales, data, family="mq", kernel_n=1)
    shift = 0.37
    m2 = fit(NodeSet(x + shift), scales, data, family="mq", kernel_n=1)
    assert abs(m1.a0 - m2.a0) <= 1e-10
    assert np.max(np.abs(m1.coeffs - m2.coeffs)) <= 1e-10


def test_offsetless_square_variant():
    # column count equals sample count only without the offset column
    x = np.linspace(-1.0, 1.0, 5)
    model = fit(NodeSet(x), ScaleSet("powers", [4.0]), x**3, strategy="square",
                family="power_distance", kernel_n=1)
    assert model.a0 == 0.0
    assert model.report.residual_max <= 1e-10


def test_least_squares_needs_enough_samples():
    x = np.linspace(-1.0, 1.0, 4)
    ev = np.linspace(-1.0, 1.0, 9)
    data = np.cos(ev)
    model = fit(NodeSet(x), ScaleSet("shape_params", [1.0]), data,
                eval_points=NodeSet(ev), strategy="least_squares",
                family="mq", kernel_n=1)
    pred = evaluate(model, ev)
    assert np.max(np.abs(pred - data)) < 0.05
    with pytest.raises(ConfigError):
        fit(NodeSet(ev), ScaleSet("shape_params", [1.0]), np.cos(x),
            eval_points=NodeSet(x), strategy="least_squares",
            family="mq", kernel_n=1)


def test_constant_data_least_squares():
    x = np.linspace(-1.0, 1.0, 6)
    ev = np.linspace(-1.0, 1.0, 13)
    model = fit(NodeSet(x), ScaleSet("shape_params", [1.0]),
                np.full(13, 3.0), eval_points=NodeSet(ev),
                strategy="least_squares", family="mq", kernel_n=1)
    # minimum-norm solution puts the constant in the offset
    assert abs(model.a0 - 3.0) < 1e-10
    assert np.linalg.norm(model.coeffs) < 1e-10


def test_greedy_multiscale():
    x = chebyshev_nodes(9, -1.0, 1.0)
    data = 1.0 / (1.0 + 25.0 * x * x)
    model = fit(NodeSet(x), ScaleSet("shape_params", [0.5, 1.0]), data,
                strategy="greedy_multiscale", family="mq", kernel_n=1)
    assert abs(model.a0 - np.mean(data)) < 1e-15
    pred = evaluate(model, x)
    assert np.max(np.abs(pred - data)) <= 1e-8


def test_singular_square_rejected():
    # an extremely flat gaussian makes the columns numerically identical
    x = np.linspace(-1.0, 1.0, 6)
    with pytest.raises(SingularError) as err:
        fit(NodeSet(x), ScaleSet("shape_params", [1e4]), np.sin(x),
            strategy="square", family="gaussian", kernel_n=1)
    assert err.value.condition is None or err.value.condition > 1e14


def test_evaluate_shapes():
    x = np.linspace(-1.0, 1.0, 5)
    model = fit(NodeSet(x), ScaleSet("shape_params", [1.0]), x, family="mq", kernel_n=1)
    assert np.isscalar(evaluate(model, 0.3))
    out = evaluate(model, np.array([0.1, 0.2]))
    assert out.shape == (2,)


def test_model_validation():
    nodes = NodeSet([0.0, 1.0])
    scales = ScaleSet("shape_params", [1.0])
    with pytest.raises(ConfigError):
        DfwModel(scales=scales, nodes=nodes, coeffs=np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        DfwModel(scales=scales, nodes=nodes, coeffs=np.array([[np.inf, 0.0]]))


def test_rational_constant_interior_centers():
    # strictly interior centers leave no way to build a constant from the
    # kernel columns alone, so the minimum-norm fit is the pure offset
    centers = np.array([-0.6, -0.2, 0.2, 0.6])
    xs = np.linspace(-1.0, 1.0, 20)
    f = np.full(20, 2.0)
    scales = ScaleSet("powers", [1.0])
    model = fit_rational(NodeSet(centers), scales, NodeSet(centers), scales,
                         xs, f, kernel_n=1, family="power_distance")
    assert model.report.residual_max <= 1e-10
    assert abs(model.numerator.a0 - 2.0) < 1e-10
    assert np.max(np.abs(model.numerator.coeffs)) < 1e-10
    assert np.max(np.abs(model.denominator.coeffs)) < 1e-10
    assert abs(evaluate_rational(model, 0.123) - 2.0) < 1e-10


def test_rational_constant_endpoint_centers_split_mass():
    # centers at the interval ends admit |x+1| + |x-1| = 2 on [-1, 1], so
    # the minimum-norm solution spreads the constant across numerator and
    # denominator; the fitted quotient still equals 2 identically
    centers = np.array([-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0])
    xs = np.linspace(-1.0, 1.0, 20)
    f = np.full(20, 2.0)
    scales = ScaleSet("powers", [1.0])
    model = fit_rational(NodeSet(centers), scales, NodeSet(centers), scales,
                         xs, f, kernel_n=1, family="power_distance")
    assert model.report.residual_max <= 1e-10
    # numerator coefficients track the denominator ones with ratio -1/2
    assert np.max(np.abs(model.numerator.coeffs + 0.5 * model.denominator.coeffs)) < 1e-10
    for probe in (-0.9, -0.3, 0.0, 0.4, 0.8):
        assert abs(evaluate_rational(model, probe) - 2.0) < 1e-10


def test_rational_resonant_fit_flags_poles():
    centers = np.array([-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0])
    xs = chebyshev_nodes(20, -1.0, 1.0)
    f = 1.0 / (1.0 + xs * xs)
    scales = ScaleSet("powers", [1.0])
    model = fit_rational(NodeSet(centers), scales, NodeSet(centers), scales,
                         xs, f, kernel_n=1, family="power_distance")
    assert model.report.residual_max <= 1e-8
    # denominator collapses onto zero over the whole interval
    assert model.pole_risk > 0.99
    with pytest.raises(PoleError):
        evaluate_rational(model, 0.3)


def test_rational_quotient_error_identity():
    # minimum-norm drives the denominator toward zero even for interior
    # centers; the diagnostics have to carry the warning, and the
    # quotient error at each sample is exactly residual/denominator
    centers = chebyshev_nodes(4, -1.0, 1.0)
    xs = chebyshev_nodes(20, -1.0, 1.0)
    f = 1.0 / (1.0 + xs * xs)
    scales = ScaleSet("powers", [1.0])
    model = fit_rational(NodeSet(centers), scales, NodeSet(centers), scales,
                         xs, f, kernel_n=1, family="power_distance")
    assert model.report.residual_max <= 1e-3
    assert model.pole_risk > 0.9
    num = np.atleast_1d(evaluate(model.numerator, xs[:, None]))
    den = np.atleast_1d(evaluate(model.denominator, xs[:, None]))
    resid = num - f * den
    quot = evaluate_rational(model, xs[:, None])
    assert np.max(np.abs((quot - f) - resid / den)) <= 1e-13
