import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from tstein import params as P
from tstein.density import (GridFunction, bilateral_gamma_int_pdf, cdf, density_grid, expectation,
                            retransform, simpson_weights)
from tstein.errors import NumericalError
from tstein.levy_cf import cf, cf_t, cumulant, law_cf

LAWS = [
    P.laplace(1.0),
    P.gamma(2.0, 1.0),
    P.symmetric(1.0, 0.0, 2.0),
    P.tsd(1.0, 0.5, 2.0, 1.0, 0.5, 2.0),
    P.tsd(0.7, 0.0, 2.0, 1.3, 0.0, 3.0),
    P.tsd(1.0, 0.5, 2.0, 3.0, 0.3, 4.0),
]


def test_gamma_closed_form():
    g = density_grid(P.gamma(2.0, 1.0))
    x = np.linspace(0.1, 10, 500)
    assert np.max(np.abs(g(x) - x * np.exp(-x))) <= 1e-6


def test_laplace_closed_form():
    g = density_grid(P.laplace(1.0))
    x = np.linspace(-8, 8, 1601)
    assert np.max(np.abs(g(x) - 0.5 * np.exp(-np.abs(x)))) <= 1e-6


def test_symmetric_vg_is_symmetric():
    g = density_grid(P.symmetric(1.0, 0.0, 1.0))
    x = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(g(x) - g(-x))) <= 1e-8


def test_gamma_three_halves():
    # Non-integer shape below 2: the sqrt cusp at 0 rings, so only the
    # unclipped grid is available; its expectations stay exact.
    p = P.gamma(1.5, 2.0)
    with pytest.raises(NumericalError):
        density_grid(p, max_n=1 << 18)
    g = density_grid(p, strict=False, max_n=1 << 18)
    x = np.linspace(0.05, 8, 300)
    assert np.max(np.abs(g(x) - stats.gamma(1.5, scale=0.5).pdf(x))) <= 1e-5
    assert expectation(g, np.cos).value == pytest.approx(cf(p, 1.0).real, abs=1e-10)


@pytest.mark.parametrize("p", LAWS, ids=lambda p: p.label())
def test_grid_invariants(p):
    g = density_grid(p)
    assert g.n >= 4096 and g.dx > 0
    assert g.values.min() >= 0
    assert abs(g.mass() - 1) <= 1e-3
    xs = np.linspace(g.x0, g.xmax, 3001)
    F = cdf(g, xs)
    assert np.all(np.diff(F) >= 0)
    assert F[-1] >= 0.999 and cdf(g, g.x0 - 1) == 0.0


@pytest.mark.parametrize("p", LAWS, ids=lambda p: p.label())
def test_retransform_consistency(p):
    # Band |z| <= Z/8 (Z the Nyquist cutoff): kinked beta = 0 densities alias
    # through the Simpson weights near Z, see decisions.
    g = density_grid(p)
    band = math.pi / g.dx / 8
    z = np.linspace(-band, band, 401 if g.n <= 1 << 16 else 25)
    assert np.max(np.abs(retransform(g, z) - cf(p, z))) <= 1e-6


@pytest.mark.parametrize("p", LAWS[2:], ids=lambda p: p.label())
def test_grid_cdf_matches_gil_pelaez(p):
    g = density_grid(p)
    x = np.linspace(-3, 3, 7)
    assert np.max(np.abs(cdf(g, x) - cdf(p, x))) <= 1e-6


def test_cdf_examples():
    assert cdf(P.laplace(1.0), 0.0) == pytest.approx(0.5, abs=1e-9)
    assert cdf(density_grid(P.laplace(1.0)), 0.0) == pytest.approx(0.5, abs=1e-8)
    assert cdf(P.gamma(1.0, 1.0), 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-8)
    assert cdf(density_grid(P.gamma(1.0, 1.0)), 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-8)


def test_expectation_examples():
    g = density_grid(P.gamma(2.0, 1.0))
    one = expectation(g, lambda x: np.ones_like(x))
    assert abs(one.value - 1) <= 1e-3
    mean = expectation(g, lambda x: x)
    assert mean.value == pytest.approx(cumulant(P.gamma(2.0, 1.0), 1), abs=1e-3)
    lap = P.laplace(1.0)
    k1, k2 = cumulant(lap, 1), cumulant(lap, 2)
    e = expectation(density_grid(lap), lambda x: x ** 2 - (k2 + k1 ** 2))
    assert abs(e.value) <= 1e-3
    assert e.error >= 0


def test_inner_law_has_atom():
    # X_(t) for beta = 0 has mass e^{-t(alpha+ + alpha-)} at 0
    law = law_cf(P.laplace(2.0), 0.3)
    g = density_grid(law)
    assert g.atom == pytest.approx(math.exp(-0.6))
    assert g.mass() == pytest.approx(1.0, abs=1e-8)
    z = np.linspace(-20, 20, 81)
    assert np.max(np.abs(retransform(g, z) - cf_t(P.laplace(2.0), z, 0.3))) <= 1e-6


def test_plain_callable_needs_window():
    f = lambda z: np.exp(-z ** 2 / 2)
    with pytest.raises(ValueError):
        density_grid(f)
    g = density_grid(f, center=0.0, halfwidth=12.0)
    x = np.linspace(-4, 4, 81)
    assert np.max(np.abs(g(x) - stats.norm.pdf(x))) <= 1e-10


def test_rough_cf_is_rejected():
    # Gamma(0.5): cf decays like |z|^-1/2, never below 1e-6 at any feasible cutoff
    with pytest.raises(NumericalError, match="too rough"):
        density_grid(P.gamma(0.5, 1.0), max_n=1 << 16)


@pytest.mark.parametrize("n", [100, 1000, 3000])
def test_bad_sizes(n):
    with pytest.raises(ValueError):
        density_grid(P.laplace(1.0), n=n)


def test_bilateral_gamma_pdf_against_convolution():
    # Gamma(2, 1.5) minus Gamma(1, 3): compare with numerical convolution
    y = np.linspace(-3, 4, 15)
    u = np.linspace(0, 40, 400001)
    ref = [np.trapezoid(stats.gamma(2, scale=1 / 1.5).pdf(u + yi) * stats.expon(scale=1 / 3).pdf(u), u)
           if yi >= 0 else
           np.trapezoid(stats.gamma(2, scale=1 / 1.5).pdf(u) * stats.expon(scale=1 / 3).pdf(u - yi), u)
           for yi in y]
    np.testing.assert_allclose(bilateral_gamma_int_pdf(2, 1, 1.5, 3.0, y), ref, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(8, 300), st.floats(-5, 0), st.floats(0.01, 0.5))
def test_simpson_weights_integrate_span(n, x0, dx):
    w = simpson_weights(x0, dx, n)
    assert w.sum() == pytest.approx(dx * (n - 1), rel=1e-12)
    x = x0 + dx * np.arange(n)
    # exact for quadratics on the Simpson core, second order overall
    assert abs(w @ x - 0.5 * (x[-1] ** 2 - x[0] ** 2)) <= 1e-9 * max(1, x[-1] ** 2 + x[0] ** 2)


def test_grid_function_interpolation():
    x0, dx = -2.0, 0.01
    x = x0 + dx * np.arange(401)
    g = GridFunction(x0, dx, np.sin(x))
    q = np.linspace(-1.9, 1.9, 77)
    assert np.max(np.abs(g(q) - np.sin(q))) <= 1e-7
    assert g(np.array([-10.0, 10.0])) == pytest.approx([np.sin(x[0]), np.sin(x[-1])])
    np.testing.assert_allclose(g.derivative(1)(q), np.cos(q), atol=1e-4)
    with pytest.raises(ValueError):
        GridFunction(0.0, 0.0, np.zeros(10))
