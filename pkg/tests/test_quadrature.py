import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelinv import QuadratureConfig, QuadratureError
from borelinv.quadrature import gauss_kronrod


@pytest.mark.parametrize("f,a,b,exact", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda x: 1 / (1 + x**2), -1.0, 1.0, math.pi / 2),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2 / 3),
    (lambda x: x**10 * np.exp(-x), 0.0, 200.0, math.factorial(10)),
    (lambda x: np.exp(1j * x), 0.0, math.pi, 2j),
])
def test_known_integrals(f, a, b, exact):
    value, err = gauss_kronrod(f, a, b, QuadratureConfig(rel_tol=1e-13))
    assert abs(value - exact) <= 1e-12 * abs(exact)
    assert err <= 1e-12 * abs(exact)


def test_breakpoints_bracketing_a_spike():
    # A panel whose nodes all miss a narrow spike reads zero with zero error,
    # so callers bracket peaks; the moment and extension code do this.
    f = lambda x: np.exp(-((x - 0.3) / 1e-4) ** 2)
    value, _ = gauss_kronrod(f, 0.0, 10.0, QuadratureConfig(rel_tol=1e-12),
                             breakpoints=[0.3 - 1e-3, 0.3, 0.3 + 1e-3])
    assert value == pytest.approx(1e-4 * math.sqrt(math.pi), rel=1e-11)


def test_budget_exhaustion_raises():
    with pytest.raises(QuadratureError):
        gauss_kronrod(lambda x: np.sin(1 / x), 1e-8, 1.0, QuadratureConfig(rel_tol=1e-14, max_subdivisions=3))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.floats(-5, 5), st.floats(0.01, 5))
def test_polynomials_exact(coef, a, width):
    b = a + width
    antider = np.polynomial.polynomial.polyint(coef)
    exact = np.polynomial.polynomial.polyval(b, antider) - np.polynomial.polynomial.polyval(a, antider)
    value, _ = gauss_kronrod(lambda x: np.polynomial.polynomial.polyval(x, coef), a, b)
    scale = np.polynomial.polynomial.polyval(max(abs(a), abs(b)), np.abs(coef)) * width
    assert abs(value - exact) <= 1e-12 * scale
