import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gamma as G

from tstein import params as P
from tstein.applications import chaos_cumulants
from tstein.density import cdf, density_grid
from tstein.levy_cf import cumulant
from tstein.sampling import (CHUNK, ChaosSpec, YSpec, positive_stable, rng_stream, run_chunks,
                             sample_equilibrium, sample_equilibrium_two_point, sample_gamma,
                             sample_geometric_sum, sample_geometric_sum_coupled,
                             sample_second_chaos, sample_tsd, tempered_stable_pieces,
                             triangular_inverse_cdf)

from conftest import FAMILIES


def z_mean(x, mu):
    return (x.mean() - mu) / (x.std(ddof=1) / math.sqrt(x.size))


def z_var(x, k2, k4):
    # Var of the sample variance ~ (mu4 - k2^2)/n, mu4 = k4 + 3 k2^2
    return (x.var(ddof=1) - k2) / math.sqrt((k4 + 2 * k2 ** 2) / x.size)


def test_gamma_mean():
    s = sample_gamma(2.0, 1.0, 10 ** 6, 1).values
    assert abs(s.mean() - 2.0) <= 5 * math.sqrt(2) / 1e3
    e = sample_gamma(1.0, 3.0, 10 ** 5, 2).values
    assert abs(z_mean(e, 1 / 3)) <= 5


def test_determinism_and_thread_invariance():
    p = FAMILIES["ts"]
    a = sample_tsd(p, 3 * CHUNK + 17, 99).values
    b = sample_tsd(p, 3 * CHUNK + 17, 99, threads=3).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_tsd(p, 3 * CHUNK + 17, 100).values)
    # prefix property: chunks do not depend on n
    assert np.array_equal(a[:CHUNK], sample_tsd(p, CHUNK, 99).values)
    assert np.array_equal(sample_gamma(2, 1, 1000, 5).values, sample_gamma(2, 1, 1000, 5).values)


def test_streams_are_distinct():
    a = rng_stream(7, 0, 0).uniform(size=4)
    b = rng_stream(7, 0, 1).uniform(size=4)
    c = rng_stream(7, 1, 0).uniform(size=4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ValueError):
        rng_stream(-1, 0)
    assert run_chunks(0, 1, lambda g, m: g.uniform(size=m)).size == 0


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_first_two_cumulants(name):
    p = FAMILIES[name]
    x = sample_tsd(p, 10 ** 5, 3).values
    assert abs(z_mean(x, cumulant(p, 1))) <= 5
    assert abs(z_var(x, cumulant(p, 2), cumulant(p, 4))) <= 5


def test_laplace_moments():
    p = P.laplace(1.0)
    x = sample_tsd(p, 10 ** 5, 4).values
    assert abs(z_var(x, 2.0, cumulant(p, 4))) <= 5
    skew = stats.skew(x)
    assert abs(skew) <= 5 * math.sqrt(6 * 6 / x.size)  # generous: excess kurtosis 3


def test_one_sided_tempered_stable_mean():
    p = P.tsd(1, 0.5, 2)
    s = sample_tsd(p, 10 ** 5, 5)
    assert abs(z_mean(s.values, G(0.5) * 2 ** -0.5)) <= 5
    assert s.meta["acceptance_rate"] > 1e-4


@pytest.mark.parametrize("side", [P.Side(1, 0.5, 2), P.Side(3, 0.9, 4), P.Side(50, 0.7, 10)])
def test_acceptance_rate_floor(side):
    p = P.tsd(side.alpha, side.beta, side.lam)
    s = sample_tsd(p, 5000, 6)
    assert s.meta["acceptance_rate"] > 1e-4
    assert tempered_stable_pieces(side) >= 1
    assert abs(z_mean(s.values, cumulant(p, 1))) <= 5


def test_positive_stable_laplace_transform():
    # E exp(-s S) = exp(-s^beta)
    x = positive_stable(np.random.default_rng(0), 0.6, 200000)
    for s in (0.5, 1.0, 2.0):
        v = np.exp(-s * x)
        assert abs(v.mean() - math.exp(-s ** 0.6)) <= 5 * v.std() / math.sqrt(v.size)


def test_kolmogorov_laplace():
    x = sample_tsd(P.laplace(1.0), 10 ** 5, 8).values
    g = density_grid(P.laplace(1.0))
    assert stats.kstest(x, lambda t: cdf(g, t)).statistic <= 0.01


def test_geometric_sum_wald():
    y = YSpec("two_point", 1.0)
    s = sample_geometric_sum(0.01, y, 10 ** 5, 9).values
    k4 = s.var() ** 2 * 3  # heavy-ish tail: Laplace-like excess kurtosis
    assert abs(z_var(s, 0.99, k4)) <= 5
    near_one = sample_geometric_sum(0.999, y, 10 ** 5, 10).values
    assert np.mean(np.abs(near_one) <= math.sqrt(0.999) + 1e-12) >= 0.99
    assert abs(z_var(near_one, 0.001, 0.001 * 3)) <= 5
    assert abs(z_mean(s, 0.0)) <= 5


@pytest.mark.parametrize("kind", ["two_point", "uniform", "laplace"])
def test_geometric_sum_summand_laws(kind):
    y = YSpec.matched(kind, 2.0)
    assert y.variance == pytest.approx(0.5)
    s = sample_geometric_sum(0.3, y, 10 ** 5, 11).values
    assert abs(z_var(s, 0.7 * 0.5, 3 * 0.35 ** 2 * 2)) <= 5
    with pytest.raises(ValueError):
        sample_geometric_sum(1.0, y, 10, 1)


def test_geometric_count_starts_at_zero():
    s = sample_geometric_sum(0.4, YSpec("uniform", 1.0), 10 ** 5, 12).values
    frac0 = np.mean(s == 0)
    assert abs(frac0 - 0.4) <= 5 * math.sqrt(0.4 * 0.6 / s.size)


def test_equilibrium_two_point():
    a = 0.8
    yl = sample_equilibrium_two_point(a, 10 ** 5, 13).values
    assert np.all(np.abs(yl) <= a)
    assert abs(z_mean(yl, 0.0)) <= 5
    assert abs(z_mean(np.abs(yl), a / 3)) <= 5
    # E g(Y) - g(0) = lam^-2 E g''(Y^L) with g = x^4, lam^2 = 2/a^2
    assert abs(z_mean(6 * a ** 2 * yl ** 2, a ** 4)) <= 5
    assert triangular_inverse_cdf(a, [0.0, 0.5, 1.0]) == pytest.approx([-a, 0.0, a])
    # the kind-based sampler uses the same law
    other = sample_equilibrium(YSpec("two_point", a), 10 ** 5, 14).values
    assert stats.ks_2samp(yl, other).pvalue > 1e-4


def test_equilibrium_uniform_defining_relation():
    # uniform on [-a, a]: Y^L has density 3(a - |v|)^2/(2a^3); check with g = x^4
    a = 1.3
    y = YSpec("uniform", a)
    yl = sample_equilibrium(y, 10 ** 5, 15).values
    lhs = a ** 4 / 5  # E Y^4
    assert abs(z_mean(12 * yl ** 2 * y.variance / 2, lhs)) <= 5


def test_coupling_identity():
    lam = 2.0
    y = YSpec.matched("two_point", lam)
    for p in (0.2, 0.05):
        s, sl = sample_geometric_sum_coupled(p, y, 10 ** 5, 16)
        gap = np.abs(s.values - sl.values)
        assert abs(z_mean(gap, y.a * math.sqrt(p) / 3)) <= 5
        # lam^2 rho sqrt(p)/6 is the same number
        assert lam ** 2 * y.rho * math.sqrt(p) / 6 == pytest.approx(y.a * math.sqrt(p) / 3)


def test_second_chaos_single_eigenvalue():
    g = sample_second_chaos(ChaosSpec((1.0,)), 10 ** 5, 17).values
    assert abs(z_mean(g, 0.0)) <= 5
    assert abs(z_var(g, 2.0, chaos_cumulants(ChaosSpec((1.0,)), 4))) <= 5


def test_second_chaos_laplace_case():
    g = sample_second_chaos(ChaosSpec((0.5, -0.5, 0.5, -0.5)), 10 ** 5, 18).values
    lap = lambda t: np.where(t < 0, 0.5 * np.exp(t), 1 - 0.5 * np.exp(-np.minimum(t, 700)))
    assert stats.kstest(g, lap).statistic <= 0.01


def test_second_chaos_product_normal():
    c = 0.7
    g = sample_second_chaos(ChaosSpec((c, -c)), 10 ** 5, 19).values
    prod = 2 * c * np.random.default_rng(3).standard_normal((2, 10 ** 5)).prod(axis=0)
    assert stats.ks_2samp(g, prod).pvalue > 1e-4


def test_chaos_spec_validation():
    with pytest.raises(ValueError):
        ChaosSpec(())
    with pytest.raises(ValueError):
        ChaosSpec((0.0, 0.0))
