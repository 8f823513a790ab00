"""Adaptive Gauss-Legendre panels against scipy's QUADPACK."""

import numpy as np
import pytest
from scipy.integrate import quad

from boundcount.errors import NonFiniteError, QuadratureError
from boundcount.quadrature import adaptive_integral, angular_nodes


@pytest.mark.parametrize("f,a,b", [
    (lambda x: np.exp(-x * x), -6.0, 6.0),
    (lambda x: np.cos(13.0 * x) * np.exp(-0.3 * x), 0.0, 10.0),
    (lambda x: 1.0 / (1.0 + x * x), -50.0, 50.0),
    (lambda x: np.exp(-np.abs(x - 1.234) * 40.0), -2.0, 4.0),
])
def test_matches_quadpack(f, a, b):
    val, err = adaptive_integral(f, a, b, rel_tol=1e-10)
    ref, _ = quad(lambda x: float(f(np.array([x]))[0]), a, b, limit=400)
    assert val == pytest.approx(ref, rel=1e-8)
    assert err <= 1e-6 * max(abs(ref), 1.0)


def test_zero_integrand():
    val, err = adaptive_integral(lambda x: np.zeros_like(x), 0.0, 1.0)
    assert val == 0.0 and err == 0.0


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        adaptive_integral(lambda x: x, 1.0, 1.0)


def test_nonfinite_sample_reports_location():
    def f(x):
        with np.errstate(divide="ignore"):
            return np.where(np.abs(x - 0.5) < 1e-9, np.inf, 1.0 / (x - 0.5))

    with pytest.raises(NonFiniteError):
        adaptive_integral(f, 0.0, 1.0)


def test_divergent_integral_raises_with_partial():
    with pytest.raises(QuadratureError) as info:
        adaptive_integral(lambda x: 1.0 / x, 0.0, 1.0, rel_tol=1e-10, max_depth=30)
    assert info.value.partial is not None


def test_angular_rule_exact_for_trig_polynomials():
    theta, w = angular_nodes(32)
    # degree < node count integrates exactly
    for k in (0, 1, 5, 15):
        vals = np.cos(k * theta)
        integral = w * np.sum(vals)
        expected = 2.0 * np.pi if k == 0 else 0.0
        assert integral == pytest.approx(expected, abs=1e-12)
    mixed = 2.0 + np.sin(3 * theta) - 0.25 * np.cos(7 * theta)
    assert w * np.sum(mixed) == pytest.approx(4.0 * np.pi, rel=1e-14)


def test_angular_rule_minimum_nodes():
    with pytest.raises(ValueError):
        angular_nodes(4)
