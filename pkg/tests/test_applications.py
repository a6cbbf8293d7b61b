import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tstein.applications import (chaos_cumulants, chaos_homotopy, compare_experiment,
                                 compare_tsd_bound, exact_chaos, fit_loglog, laplace_geo_bound,
                                 rate_experiment, six_moment_bound, six_moment_radicand,
                                 vg_chaos_experiment)
from tstein.params import ParameterError
from tstein.sampling import ChaosSpec, YSpec, sample_second_chaos


def test_compare_bound_examples():
    assert compare_tsd_bound(1.7, 2.0, 1.7, 2.0) == 0.0
    expected = Fraction(4, 3) * Fraction(5, 36) * (1 + Fraction(7, 3))
    assert compare_tsd_bound(1, 2, 1, 3) == pytest.approx(float(expected), rel=1e-14)
    with pytest.raises(ParameterError):
        compare_tsd_bound(1, 1.0, 1, 2)
    # directed: swapping the laws changes the constants
    assert compare_tsd_bound(1, 2, 1.2, 2.5) != compare_tsd_bound(1.2, 2.5, 1, 2)


def test_geo_bound_examples():
    assert laplace_geo_bound(2, 1, 0.01) == pytest.approx(1 / 36, rel=1e-14)
    assert laplace_geo_bound(2, 1, 0.0) == 0.0
    with pytest.raises(ParameterError):
        laplace_geo_bound(1.0, 1, 0.1)
    with pytest.raises(ParameterError):
        laplace_geo_bound(2.0, 0.0, 0.1)


def test_two_point_bound_vs_coupling():
    # for Y = +-a, a = sqrt(2)/lam: rho = a^3 and the coupling E|S_p - S_p^L| = a sqrt(p)/3
    lam = 2.0
    y = YSpec.matched("two_point", lam)
    assert y.rho == pytest.approx(y.a ** 3)
    assert lam ** 2 * y.rho / 6 == pytest.approx(y.a / 3)
    assert laplace_geo_bound(lam, y.rho, 0.04) == pytest.approx(y.a ** 3 * 2 * 5 / 36 * 0.2)


def test_chaos_cumulant_examples():
    c = ChaosSpec((0.5, -0.5, 0.5, -0.5))
    assert [chaos_cumulants(c, m) for m in (1, 2, 3, 4, 6)] == [0.0, 2.0, 0.0, 12.0, 240.0]
    assert chaos_cumulants(ChaosSpec((1.0,)), 2) == 2.0
    with pytest.raises(ValueError):
        chaos_cumulants(c, 7)


def test_chaos_cumulants_monte_carlo():
    c = ChaosSpec((0.6, -0.3, 0.2))
    g = sample_second_chaos(c, 10 ** 6, 41).values
    k2 = g.var()
    m3 = np.mean(g ** 3)
    for est, m in ((k2, 2), (m3, 3)):
        assert abs(est - chaos_cumulants(c, m)) <= 0.02 * max(1, abs(chaos_cumulants(c, m)))


@pytest.mark.parametrize("alpha,lam", [(1, 2), (1.5, 3), (2, 1.5), (0.5, 4)])
def test_exact_representation_radicand_vanishes(alpha, lam):
    c = exact_chaos(alpha, lam)
    assert len(c.eigenvalues) == int(4 * alpha)
    assert abs(six_moment_radicand(c, lam)) <= 1e-12
    assert six_moment_bound(c, alpha, lam) == pytest.approx(0.0, abs=1e-6)
    assert chaos_cumulants(c, 2) == pytest.approx(2 * alpha / lam ** 2)


def test_exact_representation_rejects_odd_alpha():
    with pytest.raises(ParameterError):
        exact_chaos(0.7, 2)


def test_perturbed_bound_positive():
    assert six_moment_bound(ChaosSpec((0.3, -0.25, 0.25, -0.25)), 1, 2) > 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 3.0).filter(lambda c: abs(c - 1) > 1e-3))
def test_kappa_mismatch_homogeneity(c):
    base = exact_chaos(1, 2)
    scaled = ChaosSpec(tuple(c * v for v in base.eigenvalues))
    k2 = chaos_cumulants(base, 2)
    assert abs(2 / 4 - chaos_cumulants(scaled, 2)) == pytest.approx(abs(1 - c ** 2) * k2, rel=1e-12)


def test_radicand_nonnegative_for_random_spectra():
    rng = np.random.default_rng(5)
    for _ in range(200):
        c = ChaosSpec(tuple(rng.normal(size=rng.integers(1, 8)) * 0.3))
        lam = float(rng.uniform(1.1, 5))
        rad = six_moment_radicand(c, lam)
        if rad < -1e-12:
            with pytest.raises(ValueError, match="inconsistent"):
                six_moment_bound(c, 1.0, lam)
        else:
            assert six_moment_bound(c, 1.0, lam) >= 0


def test_fit_loglog_recovers_power():
    p = np.array([0.2, 0.1, 0.05, 0.02, 0.01])
    slope, (lo, hi) = fit_loglog(p, 3 * p ** 0.5)
    assert slope == pytest.approx(0.5, abs=1e-12) and lo <= 0.5 <= hi


def test_rate_experiment_small():
    lam = 2.0
    rep = rate_experiment(lam, YSpec.matched("two_point", lam), [0.2, 0.05, 0.01], 2 * 10 ** 5, 7)
    assert [pt.p for pt in rep.points] == [0.2, 0.05, 0.01]
    for pt in rep.points:
        assert pt.within_bound
        assert abs(pt.coupling - pt.coupling_exact) <= 5 * pt.coupling_stderr
    assert rep.points[0].discrepancy > rep.points[-1].discrepancy
    with pytest.raises(ValueError):
        rate_experiment(lam, YSpec.matched("two_point", lam), [0.01, 0.2], 100, 1)
    with pytest.raises(ValueError):
        rate_experiment(lam, YSpec("two_point", 1.0), [0.2], 100, 1)


def test_compare_experiment_small():
    rep = compare_experiment(1, 2, 1.2, 2.5, 10 ** 5, 8)
    assert rep.within_bound and rep.bound == pytest.approx(compare_tsd_bound(1, 2, 1.2, 2.5))


def test_chaos_experiment_exact_and_perturbed():
    exact = vg_chaos_experiment(exact_chaos(1, 2), 1, 2, 10 ** 5, 9)
    assert exact.bound == pytest.approx(0.0, abs=1e-6)
    assert exact.discrepancy <= 4 * exact.stderr
    assert exact.w1 <= 0.02
    pert = vg_chaos_experiment(ChaosSpec((0.3, -0.25, 0.25, -0.25)), 1, 2, 10 ** 5, 10)
    assert 0 < pert.discrepancy <= pert.bound + 4 * pert.stderr


def test_homotopy_decreases():
    start = ChaosSpec((0.45, -0.1, 0.3, -0.2))
    path = chaos_homotopy(1, 2, start, [0.0, 0.5, 0.9])
    bounds = [six_moment_bound(c, 1, 2) for c in path]
    assert bounds[0] > bounds[1] > bounds[2] >= 0
    disc = [vg_chaos_experiment(c, 1, 2, 10 ** 5, 11).discrepancy for c in path]
    assert disc[0] > disc[1] > disc[2]
    with pytest.raises(ValueError):
        chaos_homotopy(1, 2, ChaosSpec((0.1,)), [0.5])
