"""Bound evaluators and experiment harnesses for three TSD approximation results.

* comparison of two symmetric VG laws (bound on d_W3),
* Laplace approximation of geometric sums (bound on d_W4, rate sqrt(p)),
* VG approximation of finite-rank second-chaos variables via cumulants.

Each harness reports a dictionary lower estimate of the distance next to the
closed-form upper bound, so a passing check is ``estimate <= bound + 4 se``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .density import cdf as grid_cdf
from .density import density_grid
from .distances import smooth_discrepancy, wasserstein1_vs_reference
from .params import ParameterError, symmetric
from .sampling import (ChaosSpec, YSpec, sample_geometric_sum_coupled, sample_second_chaos,
                       sample_tsd)
from .testfunctions import default_dictionary


def _need_lambda_gt_1(lam: float, name: str = "lambda") -> None:
    if not lam > 1:
        raise ParameterError(f"{name} must exceed 1 for the bound to hold")


def compare_tsd_bound(alpha1: float, lam1: float, alpha2: float, lam2: float) -> float:
    """Upper bound on d_W3(Y, X), X ~ TSD(a1,0,l1;a1,0,l1), Y ~ TSD(a2,0,l2;a2,0,l2).

    Directed: the constants depend on the X parameters only.
    """
    _need_lambda_gt_1(lam1, "lambda_1")
    if min(alpha1, alpha2, lam2) <= 0:
        raise ParameterError("alpha and lambda must be positive")
    d_var = abs(alpha1 / lam1 ** 2 - alpha2 / lam2 ** 2)
    d_scale = abs(1.0 / lam1 ** 2 - 1.0 / lam2 ** 2)
    return lam1 ** 2 / (lam1 ** 2 - 1.0) * (d_var + 2.0 * (1.0 + alpha1 / (3.0 * lam1)) * d_scale)


def laplace_geo_bound(lam: float, rho: float, p: float) -> float:
    """Bound on d_W4(S_p, Laplace(0, 1/lam^2)) with rho = E|Y|^3."""
    _need_lambda_gt_1(lam)
    if not rho > 0:
        raise ParameterError("rho must be positive")
    if not 0 <= p < 1:
        raise ParameterError("p must lie in [0, 1)")
    return rho * lam * (2.0 * lam + 1.0) / (12.0 * (lam ** 2 - 1.0)) * math.sqrt(p)


def chaos_cumulants(chaos: ChaosSpec, m: int) -> float:
    """kappa_m(G) = 2^(m-1) (m-1)! sum lam_i^m (0 for m = 1)."""
    if not 1 <= m <= 6:
        raise ValueError("cumulant order must be in 1..6")
    if m == 1:
        return 0.0
    lam = np.asarray(chaos.eigenvalues)
    return float(2 ** (m - 1) * math.factorial(m - 1) * np.sum(lam ** m))


def six_moment_radicand(chaos: ChaosSpec, lam: float) -> float:
    k2, k3, k4, k6 = (chaos_cumulants(chaos, m) for m in (2, 3, 4, 6))
    return k6 / 120.0 - k4 / (3.0 * lam ** 2) + k3 ** 2 / 4.0 + k2 / lam ** 4


def six_moment_bound(chaos: ChaosSpec, alpha: float, lam: float) -> float:
    """Cumulant bound on d_W3(G, X) for X ~ TSD(alpha,0,lam;alpha,0,lam)."""
    _need_lambda_gt_1(lam)
    rad = six_moment_radicand(chaos, lam)
    if rad < -1e-12:
        raise ValueError(f"inconsistent cumulants: radicand {rad:.3g} < 0")
    k2 = chaos_cumulants(chaos, 2)
    c = lam ** 2 / (lam ** 2 - 1.0)
    return c / 3.0 * math.sqrt(max(rad, 0.0)) + c / 2.0 * abs(2.0 * alpha / lam ** 2 - k2)


def exact_chaos(alpha: float, lam: float) -> ChaosSpec:
    """2 alpha pairs of eigenvalues +-1/(2 lam): G has exactly the law TSD(alpha,0,lam;alpha,0,lam)."""
    if not float(2 * alpha).is_integer() or alpha <= 0:
        raise ParameterError("the exact representation needs 2*alpha to be a positive integer")
    c = 1.0 / (2.0 * lam)
    return ChaosSpec(tuple(v for _ in range(int(2 * alpha)) for v in (c, -c)))


# ---------------------------------------------------------------------------
# Experiments


@dataclass(frozen=True)
class RatePoint:
    p: float
    discrepancy: float
    stderr: float
    bound: float
    coupling: float  # mean |S_p - S_p^L|
    coupling_stderr: float
    coupling_exact: Optional[float]  # sqrt(p) E|Y^L| when known in closed form

    @property
    def within_bound(self) -> bool:
        return self.discrepancy <= self.bound + 4.0 * self.stderr


@dataclass(frozen=True)
class RateReport:
    lam: float
    y_spec: YSpec
    n: int
    seed: int
    points: Tuple[RatePoint, ...]
    slope: float
    slope_ci: Tuple[float, float]
    meta: Dict = field(default_factory=dict)


def _equilibrium_abs_mean(y: YSpec) -> Optional[float]:
    return {"two_point": y.a / 3.0, "uniform": y.a / 4.0, "laplace": y.a}[y.kind]


def fit_loglog(p: Sequence[float], d: Sequence[float]) -> Tuple[float, Tuple[float, float]]:
    """Least-squares slope of log d on log p with a 95% t interval."""
    res = stats.linregress(np.log(p), np.log(d))
    if len(p) > 2:
        q = stats.t.ppf(0.975, len(p) - 2) * res.stderr
    else:
        q = float("nan")
    return float(res.slope), (float(res.slope - q), float(res.slope + q))


def rate_experiment(lam: float, y_spec: YSpec, p_grid: Sequence[float], n: int, seed: int,
                    threads: int = 1, r: int = 4) -> RateReport:
    """Geometric-sum discrepancies against Laplace(0, 1/lam^2) over a decreasing p grid."""
    _need_lambda_gt_1(lam)
    p_grid = [float(p) for p in p_grid]
    if any(b >= a for a, b in zip(p_grid, p_grid[1:])):
        raise ValueError("p values must be strictly decreasing")
    if abs(y_spec.variance - 2.0 / lam ** 2) > 1e-12 * y_spec.variance:
        raise ValueError("summands must have variance 2/lam^2")
    ref = density_grid(symmetric(1.0, 0.0, lam))
    dic = default_dictionary(r)
    pts = []
    for i, p in enumerate(p_grid):
        s, sl = sample_geometric_sum_coupled(p, y_spec, n, seed, threads, stream=i)
        disc = smooth_discrepancy(s, ref, r, dic)
        gap = np.abs(s.values - sl.values)
        eq = _equilibrium_abs_mean(y_spec)
        pts.append(RatePoint(p, disc.value, disc.stderr, laplace_geo_bound(lam, y_spec.rho, p),
                             float(gap.mean()), float(gap.std(ddof=1) / math.sqrt(n)),
                             None if eq is None else math.sqrt(p) * eq))
    slope, ci = fit_loglog([q.p for q in pts], [q.discrepancy for q in pts])
    return RateReport(lam, y_spec, n, seed, tuple(pts), slope, ci, {"r": r, "dictionary": len(dic)})


@dataclass(frozen=True)
class CompareReport:
    alpha1: float
    lam1: float
    alpha2: float
    lam2: float
    bound: float
    discrepancy: float
    stderr: float
    n: int

    @property
    def within_bound(self) -> bool:
        return self.discrepancy <= self.bound + 4.0 * self.stderr


def compare_experiment(alpha1: float, lam1: float, alpha2: float, lam2: float, n: int, seed: int,
                       threads: int = 1, r: int = 3) -> CompareReport:
    """Samples of Y ~ TSD(a2,0,l2;a2,0,l2) against the exact law of X."""
    bound = compare_tsd_bound(alpha1, lam1, alpha2, lam2)
    y = sample_tsd(symmetric(alpha2, 0.0, lam2), n, seed, threads)
    ref = density_grid(symmetric(alpha1, 0.0, lam1))
    d = smooth_discrepancy(y, ref, r)
    return CompareReport(alpha1, lam1, alpha2, lam2, bound, d.value, d.stderr, n)


@dataclass(frozen=True)
class ChaosReport:
    eigenvalues: Tuple[float, ...]
    alpha: float
    lam: float
    cumulants: Dict[int, float]
    radicand: float
    bound: float
    discrepancy: float
    stderr: float
    w1: float
    n: int

    @property
    def within_bound(self) -> bool:
        return self.discrepancy <= self.bound + 4.0 * self.stderr


def vg_chaos_experiment(chaos: ChaosSpec, alpha: float, lam: float, n: int, seed: int,
                        threads: int = 1, r: int = 3) -> ChaosReport:
    """Second-chaos samples against the symmetric VG law TSD(alpha,0,lam;alpha,0,lam)."""
    _need_lambda_gt_1(lam)
    g = sample_second_chaos(chaos, n, seed, threads)
    ref = density_grid(symmetric(alpha, 0.0, lam))
    d = smooth_discrepancy(g, ref, r)
    w1 = wasserstein1_vs_reference(g, lambda x: grid_cdf(ref, x))
    return ChaosReport(chaos.eigenvalues, alpha, lam, {m: chaos_cumulants(chaos, m) for m in range(1, 7)},
                       six_moment_radicand(chaos, lam), six_moment_bound(chaos, alpha, lam),
                       d.value, d.stderr, w1, n)


def chaos_homotopy(alpha: float, lam: float, start: ChaosSpec, steps: Sequence[float]) -> List[ChaosSpec]:
    """Eigenvalue sets (1 - u) * start + u * exact for u in steps (same length required)."""
    exact = np.asarray(exact_chaos(alpha, lam).eigenvalues)
    base = np.asarray(start.eigenvalues)
    if base.shape != exact.shape:
        raise ValueError("start must have as many eigenvalues as the exact representation")
    return [ChaosSpec(tuple((1 - u) * base + u * exact)) for u in steps]
