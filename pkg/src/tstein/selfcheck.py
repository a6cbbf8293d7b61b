"""Quick invariant suites behind ``tstein selfcheck`` (a few seconds in total)."""

from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

from . import _kernels, _pykernels
from . import params as P
from .applications import compare_tsd_bound, exact_chaos, six_moment_radicand
from .density import cdf, density_grid, expectation
from .distances import wasserstein1
from .levy_cf import cf, cf_exponent, cumulant, k_function
from .sampling import sample_tsd
from .semigroup import generator_fd, pt_apply, pt_grid, solve_stein
from .stein_op import SteinOperatorSpec, generator_apply, stein_apply
from .testfunctions import gaussian, polynomial, tanh_step


def _params_suite():
    forms = P.vg_convert(P.VG1(1.3, 2.0, 3.5))
    back = P.vg_convert(forms.vg2).vg1
    err = max(abs(back.alpha - 1.3) / 1.3, abs(back.lambda_plus - 2.0) / 2, abs(back.lambda_minus - 3.5) / 3.5)
    try:
        P.tsd(1, 1.0, 1)
        rejects = False
    except P.ParameterError:
        rejects = True
    return err < 1e-12 and rejects, f"VG round trip {err:.1e}"


def _cf_suite():
    z = np.linspace(-20, 20, 401)
    worst = 0.0
    for a, lp, lm in [(0.7, 1.5, 2.5), (2.0, 1.0, 4.0), (1.0, 3.0, 3.0)]:
        vg1 = (1 - 1j * z * (1 / lp - 1 / lm) + z ** 2 / (lp * lm)) ** (-a)
        worst = max(worst, float(np.max(np.abs(cf(P.tsd(a, 0, lp, a, 0, lm), z) - vg1))))
    p = P.tsd(1, 0.5, 2, 3, 0.3, 4)
    herm = float(np.max(np.abs(cf_exponent(p, -z) - np.conj(cf_exponent(p, z)))))
    u = np.geomspace(1e-4, 50, 400)
    mono = bool(np.all(np.diff(k_function(p, u)) < 0) and np.all(np.diff(k_function(p, -u[::-1])) < 0))
    return worst < 1e-10 and herm < 1e-12 and mono, f"Frullani {worst:.1e}, Hermitian {herm:.1e}"


def _density_suite():
    g = density_grid(P.laplace(1.0))
    x = g.x[np.abs(g.x) <= 8]
    err = float(np.max(np.abs(g(x) - 0.5 * np.exp(-np.abs(x)))))
    var = expectation(g, lambda y: y ** 2).value
    mid = float(cdf(g, 0.0))
    return err < 1e-6 and abs(var - 2) < 1e-3 and abs(mid - 0.5) < 1e-6, f"Laplace pdf {err:.1e}"


def _sampling_suite():
    p = P.tsd(1, 0.5, 2, 1, 0.5, 2)
    s = sample_tsd(p, 20000, 11).values
    z = (s.mean() - cumulant(p, 1)) / (s.std() / math.sqrt(s.size))
    same = np.array_equal(s, sample_tsd(p, 20000, 11, threads=2).values)
    return abs(z) < 5 and same, f"mean z-score {z:.2f}, thread-identical {same}"


def _stein_suite():
    p = P.tsd(1, 0.5, 2, 1, 0.3, 3)
    spec = SteinOperatorSpec(p)
    x = np.linspace(-2, 2, 9)
    worst = 0.0
    for k in range(7):
        exp = -x ** (k + 1) + sum(math.comb(k, j) * x ** (k - j) * cumulant(p, j + 1) for j in range(k + 1))
        got = stein_apply(spec, polynomial([0] * k + [1]), x)
        worst = max(worst, float(np.max(np.abs(got - exp) / np.maximum(1, np.abs(exp)))))
    return worst < 1e-10, f"polynomial exactness {worst:.1e}"


def _semigroup_suite():
    p = P.laplace(2.0)
    h = gaussian()
    x = np.linspace(-3, 3, 7)
    comp = float(np.max(np.abs(pt_apply(p, h, 1.0, x) - pt_apply(p, pt_grid(p, h, 0.5, -20, 20, 4001), 0.5, x))))
    gen = float(np.max(np.abs(generator_fd(p, h, x) - generator_apply(p, h, x))))
    ident = float(np.max(np.abs(pt_apply(p, h, 0.0, x) - h(x))))
    return ident == 0 and comp < 1e-5 and gen < 5e-3, f"composition {comp:.1e}, generator {gen:.1e}"


def _solver_suite():
    sol = solve_stein(P.laplace(2.0), tanh_step())
    res = float(np.max(np.abs(sol.residual(np.linspace(-4, 4, 161)))))
    return res < 1e-3, f"sup residual {res:.1e}"


def _distance_suite():
    x = np.random.default_rng(0).normal(size=1000)
    return abs(wasserstein1(x, x + 0.3) - 0.3) < 1e-12, "translation"


def _bounds_suite():
    zero = compare_tsd_bound(1, 2, 1, 2)
    rad = six_moment_radicand(exact_chaos(1, 2), 2)
    return zero == 0 and abs(rad) <= 1e-12, f"radicand {rad:.1e}"


def _kernel_suite():
    rng = np.random.default_rng(1)
    v = rng.normal(size=200)
    xs = rng.uniform(-1, 22, 500)
    sh, w = rng.normal(size=7), rng.normal(size=7)
    a = _kernels.shifted_sum(0.0, 0.1, v, xs, sh, w)
    b = _pykernels.shifted_sum(0.0, 0.1, v, xs, sh, w)
    d = float(np.max(np.abs(a - b)))
    return d < 1e-12, f"{_kernels.BACKEND} vs python {d:.1e}"


SUITES: List[Tuple[str, Callable]] = [
    ("params", _params_suite), ("levy_cf", _cf_suite), ("density", _density_suite),
    ("sampling", _sampling_suite), ("stein_op", _stein_suite), ("semigroup", _semigroup_suite),
    ("solver", _solver_suite), ("distances", _distance_suite), ("applications", _bounds_suite),
    ("kernels", _kernel_suite),
]


def run_all():
    out = []
    for name, fn in SUITES:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed suite, not a crashed command
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
