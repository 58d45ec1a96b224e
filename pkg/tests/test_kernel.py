import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from scipy.special import lambertw

from borelinv import DomainError, ParamError, SectorSpec
from borelinv.kernel import (
    KernelParams,
    constants,
    flatness_fit,
    g_complex,
    g_real,
    g_real_derivative,
    g_real_monotonicity_probe,
    kernel_e,
    log_kernel_e,
    sandwich_fit,
    sector_bound_fit,
)


def e_oracle(tau, sigma, z):
    """Kernel via scipy's Lambert W, straight from the definition."""
    a, b = constants(tau, sigma)
    L = cmath.log(z + 1)
    g = L ** (sigma / (sigma - 1)) * complex(lambertw(b * L)) ** (-1 / (sigma - 1))
    return z * cmath.exp(-a * g)


def test_constants_closed_form():
    a, b = constants(1.0, 1.5)
    assert a == pytest.approx((1 / 3) ** 2, rel=1e-15)
    assert b == pytest.approx(math.exp(1 / 3) / 3, rel=1e-15)
    with pytest.raises(ParamError):
        constants(1.0, 1.0)


@pytest.mark.parametrize("z", [1e-3, 0.5, 7.0, 1 + 1j, -0.5 + 0.1j, 30 * cmath.exp(2.5j), 1e4 - 3e3j])
def test_kernel_matches_definition(z):
    assert abs(kernel_e(KernelParams(1.0, 1.5), z) / e_oracle(1.0, 1.5, z) - 1) < 1e-12


def test_kernel_near_origin_and_domain():
    p = KernelParams(1.0, 1.5)
    z = 1e-6 * np.exp(1j * np.linspace(-0.9 * math.pi, 0.9 * math.pi, 51))
    assert np.max(np.abs(kernel_e(p, z) / z - 1)) < 1e-3
    with pytest.raises(DomainError):
        kernel_e(p, -1.0)
    with pytest.raises(DomainError):
        g_complex(p, 0.5)


def test_log_kernel_survives_underflow():
    p = KernelParams(1.0, 1.5)
    assert kernel_e(p, 1e200) == 0.0
    assert math.isfinite(log_kernel_e(p, 1e200).real)


def test_g_identity_with_continuous_maximizer():
    # a g(x) equals p* ln x where p* maximizes p ln x - tau p^sigma ln p over real p.
    for sigma in (1.25, 1.5, 1.75):
        p = KernelParams(1.0, sigma)
        for x in (10.0, 1e3, 1e6):
            L = math.log(x)
            res = minimize_scalar(lambda q: -(q * L - q**sigma * math.log(q)),
                                  bounds=(1.0, 1e6), method="bounded",
                                  options={"xatol": 1e-12})
            assert p.a * g_real(p, x) == pytest.approx(res.x * L, rel=1e-7)


def test_g_derivative_finite_differences():
    p = KernelParams(1.0, 1.5)
    x = np.geomspace(1.5, 1e12, 200)
    h = 1e-5 * x
    fd = (g_real(p, x + h) - g_real(p, x - h)) / (2 * h)
    assert np.max(np.abs(fd / g_real_derivative(p, x) - 1)) < 1e-6
    gmin, glast = g_real_monotonicity_probe(p, np.geomspace(1 + 1e-9, 1e12, 1001)[1:])
    assert gmin > 0 and g_real_derivative(p, 1e8) < 1e-3


def test_g_real_shifted_matches_complex():
    p = KernelParams(0.8, 1.6)
    x = np.geomspace(1e-4, 1e4, 30)
    assert np.allclose(g_real(p, x, shifted=True), g_complex(p, x + 1).real, rtol=1e-13)


@pytest.mark.parametrize("delta,C1,C2", [
    (0.5, 0.43446, 9.0081),
    (1.0, 0.19843, 10.195),
    (1.5, 0.090707, 42.899),
])
def test_sector_fit_regression(delta, C1, C2):
    fit = sector_bound_fit(KernelParams(1.0, 1.5), SectorSpec(delta, 1e-3, 1e3))
    assert fit.constants["C1"] == pytest.approx(C1, rel=1e-3)
    assert fit.constants["C2"] == pytest.approx(C2, rel=1e-3)
    assert fit.max_residual <= 1e-12


def test_sector_fit_needs_proper_bounded_sector():
    with pytest.raises(ParamError):
        sector_bound_fit(KernelParams(1.0, 1.5), SectorSpec(1.0, 0.0, 1e3))


def test_sandwich_lower_constant_drifts():
    # T - a g = -log M_{p*} + O(log) decreases without bound, so A depends on the grid.
    p = KernelParams(1.0, 1.5)
    short = sandwich_fit(p).constants
    long = sandwich_fit(p, np.geomspace(1.0, 1e12, 1001)[1:]).constants
    assert short["argmin_x"] == 1e6
    assert long["log_A"] < short["log_A"] - 100
    assert 0 < short["log_A_tilde"] < 1


def test_flatness_fit_finite_and_sigma_guard():
    fit = flatness_fit(KernelParams(1.0, 1.5), SectorSpec(1.0, 1e-3, 1e3), 60, 17)
    assert all(0 < v < math.inf for v in fit.constants.values())
    with pytest.raises(ParamError):
        flatness_fit(KernelParams(1.0, 2.5), SectorSpec(1.0, 1e-3, 1e3))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(1.1, 1.9), st.floats(1e-4, 1e4), st.floats(-2.8, 2.8))
def test_kernel_conjugate_symmetric_and_positive_on_reals(tau, sigma, r, t):
    p = KernelParams(tau, sigma)
    z = r * cmath.exp(1j * t)
    assert abs(kernel_e(p, z.conjugate()) - kernel_e(p, z).conjugate()) <= 1e-13 * abs(kernel_e(p, z)) + 1e-300
    assert kernel_e(p, r).real > 0 or kernel_e(p, r) == 0.0
