import numpy as np
import pytest

from dfwave.distances import (AnisotropyTensor, euclidean, general_distance,
                              geodesic_distance, pairwise_euclidean)
from dfwave.exceptions import ConfigError


def test_known_values():
    assert general_distance([0.0, 0.0], [3.0, 4.0], 2.0) == 5.0
    assert general_distance([0.0, 0.0], [3.0, 4.0], 1.0) == 7.0
    assert general_distance([1.0, 2.0], [1.0, 2.0], 2.0) == 0.0
    # large s approaches the max coordinate difference
    assert abs(general_distance([0.0, 0.0], [3.0, 4.0], 200.0) - 4.0) < 1e-6


def test_symmetry_bit_exact():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = rng.integers(1, 5)
        x = rng.normal(size=d)
        y = rng.normal(size=d)
        s = float(rng.uniform(0.5, 6.0))
        assert general_distance(x, y, s) == general_distance(y, x, s)


def test_overflow_safe():
    x = np.array([1e200, 0.0])
    y = np.array([0.0, 1e200])
    v = general_distance(x, y, 2.0)
    assert np.isfinite(v)
    assert abs(v / 1e200 - np.sqrt(2.0)) < 1e-12


def test_bad_exponent():
    with pytest.raises(ConfigError):
        general_distance([0.0], [1.0], 0.0)
    with pytest.raises(ConfigError):
        general_distance([0.0], [1.0], -2.0)


def test_tensor_validation():
    with pytest.raises(ConfigError):
        AnisotropyTensor(np.array([[1.0, 0.1], [0.2, 1.0]]))  # not symmetric
    with pytest.raises(ConfigError):
        AnisotropyTensor(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite
    t = AnisotropyTensor(np.array([[2.0, 0.0], [0.0, 0.5]]))
    assert abs(t.det - 1.0) < 1e-14


def test_geodesic_identity_tensor_is_euclidean():
    rng = np.random.default_rng(3)
    kappa = AnisotropyTensor(np.eye(3))
    for _ in range(100):
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        assert abs(geodesic_distance(x, y, kappa) - euclidean(x, y)) < 1e-14


def test_geodesic_congruence():
    # distance is invariant under x -> T x when kappa -> T kappa T^T
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = rng.normal(size=(3, 3))
        kappa = AnisotropyTensor(a @ a.T + 3.0 * np.eye(3))
        t = rng.normal(size=(3, 3)) + 2.0 * np.eye(3)
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        k2 = t @ kappa.kappa @ t.T
        k2 = AnisotropyTensor(0.5 * (k2 + k2.T))
        d1 = geodesic_distance(x, y, kappa)
        d2 = geodesic_distance(t @ x, t @ y, k2)
        assert abs(d1 - d2) <= 1e-10 * max(d1, 1.0)


def test_geodesic_known_value():
    kappa = AnisotropyTensor(np.array([[4.0, 0.0], [0.0, 1.0]]))
    # squared form (2,0) kappa^{-1} (2,0)^T = 4/4 = 1
    assert abs(geodesic_distance([0.0, 0.0], [2.0, 0.0], kappa) - 1.0) < 1e-14


def test_pairwise():
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    Y = np.array([[0.0, 1.0]])
    d = pairwise_euclidean(X, Y)
    assert d.shape == (2, 1)
    assert abs(d[0, 0] - 1.0) < 1e-15
    assert abs(d[1, 0] - np.sqrt(2.0)) < 1e-15
