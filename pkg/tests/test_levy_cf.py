import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import gamma as G

from tstein import params as P
from tstein.levy_cf import (cf, cf_exponent, cf_t, cumulant, cumulant_t, k_function, law_cf,
                            levy_density)

CASES = [
    P.laplace(1.0),
    P.gamma(2.0, 1.0),
    P.tsd(1.0, 0.5, 2.0, 1.0, 0.5, 2.0),
    P.tsd(1.0, 0.5, 2.0, 3.0, 0.9, 4.0),
    P.tsd(0.7, 0.2, 0.5, 2.5, 0.0, 3.0),
    P.tsd(2.0, 0.75, 1.5),
]

side_st = st.tuples(st.floats(0.1, 5), st.sampled_from([0.0, 0.1, 0.5, 0.9]), st.floats(0.2, 10))


@st.composite
def tsd_params(draw):
    a = draw(side_st)
    b = draw(st.one_of(st.none(), side_st))
    return P.tsd(*a, *(b or (None, None, None)))


def _side_eta_quad(alpha, beta, lam, z):
    """int_0^inf (e^{izu} - 1) alpha u^{-1-beta} e^{-lam u} du by adaptive quadrature.

    The u^{-beta} factor goes into QUADPACK's algebraic weight on [0, b0];
    beyond b0 the integrand is smooth and is split into half-period panels.
    """
    def smooth(u, part):
        w = np.expm1(1j * z * u) / u if u > 0 else 1j * z
        return alpha * np.exp(-lam * u) * (w.real if part == 0 else w.imag)

    b0 = min(1.0, 60.0 / lam)
    out = 0j
    for part, unit in ((0, 1.0), (1, 1j)):
        v, _ = integrate.quad(smooth, 0.0, b0, args=(part,), weight="alg", wvar=(-beta, 0.0),
                              epsabs=1e-13, epsrel=1e-12, limit=400)
        out += unit * v
    top = 60.0 / lam
    if top > b0:
        width = math.pi / max(abs(z), 1.0)
        edges = np.append(np.arange(b0, top, width), top)
        for lo, hi in zip(edges[:-1], edges[1:]):
            for part, unit in ((0, 1.0), (1, 1j)):
                v, _ = integrate.quad(lambda u: smooth(u, part) * u ** -beta, lo, hi,
                                      epsabs=1e-14, epsrel=1e-12)
                out += unit * v
    return out


def eta_quad(p, z):
    return sum(_side_eta_quad(s.alpha, s.beta, s.lam, sign * z) for sign, s in p.sides())


def test_levy_density_examples():
    assert levy_density(P.laplace(1.0), 1.0) == pytest.approx(math.exp(-1))
    assert levy_density(P.gamma(2.0, 1.0), -1.0) == 0.0
    p = P.tsd(2, 0.5, 3, 1, 0, 1)
    assert levy_density(p, 0.5) == pytest.approx(2 * 0.5 ** -1.5 * math.exp(-1.5), rel=1e-14)
    with pytest.raises(ValueError):
        levy_density(p, 0.0)


@pytest.mark.parametrize("p", CASES, ids=lambda p: p.label())
@pytest.mark.parametrize("z", [-17.0, -3.0, -0.4, 0.25, 1.0, 6.5, 20.0])
def test_exponent_matches_quadrature(p, z):
    assert abs(cf_exponent(p, z) - eta_quad(p, z)) <= 1e-8


def test_closed_form_examples():
    z = np.linspace(-20, 20, 101)
    for a, lam in [(2.0, 1.0), (0.3, 5.0)]:
        np.testing.assert_allclose(cf(P.gamma(a, lam), z), (1 - 1j * z / lam) ** -a, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(cf(P.laplace(3.0), z), 1 / (1 + z ** 2 / 9), rtol=1e-13, atol=1e-15)
    for p in CASES:
        assert cf_exponent(p, 0.0) == 0
        assert cf(p, 0.0) == 1


def eta_mp(p, z):
    """Closed-form exponent at 30 digits.

    In double precision (lam - iz)^beta - lam^beta cancels badly for tiny z,
    which swamps a fourth difference at step 1e-3.
    """
    with mpmath.workdps(30):
        out = mpmath.mpc(0)
        for sign, s in p.sides():
            w = mpmath.mpf(s.lam) - 1j * sign * mpmath.mpf(z)
            if s.beta == 0:
                out += -s.alpha * mpmath.log(w / s.lam)
            else:
                out += s.alpha * mpmath.gamma(-mpmath.mpf(s.beta)) * (w ** s.beta - mpmath.mpf(s.lam) ** s.beta)
        return out


def richardson_derivs(fn, h=1e-3):
    """Derivatives 1..4 at 0 by central differences at h and h/2, Richardson-combined."""
    def central(step):
        k = np.arange(-3, 4)
        v = {int(j): fn(j * step) for j in k}
        d1 = (v[1] - v[-1]) / (2 * step)
        d2 = (v[1] - 2 * v[0] + v[-1]) / step ** 2
        d3 = (v[2] - 2 * v[1] + 2 * v[-1] - v[-2]) / (2 * step ** 3)
        d4 = (v[2] - 4 * v[1] + 6 * v[0] - 4 * v[-1] + v[-2]) / step ** 4
        return [d1, d2, d3, d4]

    return [complex((4 * a - b) / 3) for a, b in zip(central(h / 2), central(h))]


@pytest.mark.parametrize("p", CASES, ids=lambda p: p.label())
def test_cumulants_by_finite_differences(p):
    d = richardson_derivs(lambda z: eta_mp(p, z))
    for m in range(1, 5):
        exact = cumulant(p, m)
        got = (d[m - 1] / 1j ** m).real
        scale = max(abs(exact), cumulant(p, 2) ** (m / 2))  # odd cumulants may vanish
        assert abs(got - exact) <= 1e-4 * scale, (m, got, exact)


def test_cumulant_examples():
    assert cumulant(P.gamma(2.5, 2.0), 1) == pytest.approx(1.25, rel=1e-15)
    assert cumulant(P.laplace(3.0), 2) == pytest.approx(2 / 9, rel=1e-15)
    assert cumulant(P.tsd(1, 0.5, 2, 1, 0.5, 2), 3) == 0.0
    assert cumulant(P.tsd(1, 0.5, 2), 1) == pytest.approx(G(0.5) * 2 ** -0.5)
    with pytest.raises(ValueError):
        cumulant(P.laplace(1.0), 0)


def test_cf_t_limits():
    p = P.tsd(1, 0.5, 2, 3, 0.0, 4)
    z = np.linspace(-10, 10, 41)
    assert np.all(cf_t(p, z, 0.0) == 1)
    assert cf_t(p, 0.0, 2.0) == 1
    np.testing.assert_allclose(cf_t(P.laplace(1.0), z, 40.0), cf(P.laplace(1.0), z), atol=1e-15)
    assert cumulant_t(p, 2, 0.7) == pytest.approx(cumulant(p, 2) * (1 - math.exp(-1.4)))


def test_law_cf_structure():
    # beta = 0: atom s^(alpha+ + alpha-) plus closed-form reference terms
    law = law_cf(P.tsd(0.7, 0, 2, 1.3, 0, 3), 0.5)
    assert law.atom == pytest.approx(math.exp(-0.5 * 2.0))
    z = np.linspace(-30, 30, 61)
    np.testing.assert_allclose(law(z), cf_t(law.params, z, 0.5), atol=1e-15)
    assert law_cf(P.laplace(1.0)).atom == 0.0


@settings(max_examples=60, deadline=None)
@given(tsd_params(), st.floats(-50, 50), st.floats(0, 30))
def test_exponent_properties(p, z, t):
    e = cf_exponent(p, z)
    assert e.real <= 1e-12
    assert cf_exponent(p, -z) == pytest.approx(np.conj(e), rel=1e-13, abs=1e-13)
    assert abs(cf_t(p, z, t)) <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(tsd_params())
def test_k_function_decreasing(p):
    u = np.geomspace(1e-4, 60, 500)
    for sign, _ in p.sides():
        k = k_function(p, sign * u) if sign > 0 else k_function(p, -u[::-1])
        assert np.all(np.diff(k) < 0)
