"""Densities, CDFs and expectations of TSD laws by Fourier inversion.

Inversion works on ``cf - atom - refs`` where ``refs`` are the closed-form
integer-shape gamma terms carried by :class:`~tstein.levy_cf.LawCf`; those
terms hold the jumps and kinks of beta = 0 laws, so the FFT only sees a
remainder that decays quickly.  Their densities are added back on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy import integrate, interpolate
from scipy.special import binom, gammaln

from . import _kernels
from .errors import NumericalError
from .levy_cf import LawCf, law_cf
from .params import TsdParams


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the uniform grid ``x0 + j*dx``; cubic between nodes, constant outside.

    ``derivs`` optionally holds grids of the first, second, ... derivatives.
    When the grid is a density, ``atom`` is an extra point mass at zero.
    ``brk`` marks a node where the function may jump or kink; interpolation
    never crosses it and uses the one-sided limits ``brk_limits`` there.
    """

    x0: float
    dx: float
    values: np.ndarray
    derivs: tuple = ()
    atom: float = 0.0
    meta: dict = field(default_factory=dict)
    brk: int = -1
    brk_limits: tuple = (0.0, 0.0)
    masses: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if len(self.values) < 8:
            raise ValueError("a grid function needs at least 8 nodes")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def xmax(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def __call__(self, x):
        b = self.brk
        if b < 4 or b > self.n - 5:
            return _kernels.cubic_eval(self.x0, self.dx, self.values, x)
        x = np.asarray(x, dtype=float)
        xb = self.x0 + b * self.dx
        out = np.full(x.shape, self.values[b])
        left, right = x < xb, x > xb
        lv = self.values[:b + 1].copy()
        lv[-1] = self.brk_limits[0]
        rv = self.values[b:].copy()
        rv[0] = self.brk_limits[1]
        out[left] = _kernels.cubic_eval(self.x0, self.dx, lv, x[left])
        out[right] = _kernels.cubic_eval(xb, self.dx, rv, x[right])
        return out

    def derivative(self, k: int = 1) -> "GridFunction":
        if k == 0:
            return self
        if len(self.derivs) >= k:
            vals, rest = self.derivs[k - 1], self.derivs[k:]
        else:
            vals = self.values
            for _ in range(k):
                vals = np.gradient(vals, self.dx, edge_order=2)
            rest = ()
        return GridFunction(self.x0, self.dx, np.asarray(vals), rest)

    def weights(self) -> np.ndarray:
        """Composite Simpson weights with a panel boundary at the node nearest 0.

        Densities may jump or kink at 0 (with the midpoint value stored there);
        putting 0 on a panel edge keeps the rule fourth order on each piece.
        """
        return simpson_weights(self.x0, self.dx, self.n)

    def point_masses(self) -> np.ndarray:
        """Quadrature masses at the nodes: int h dF ~ sum_j m_j h(x_j) + atom h(0)."""
        if self.masses is not None:
            return self.masses
        return self.weights() * self.values

    def mass(self) -> float:
        return float(self.point_masses().sum()) + self.atom


def simpson_weights(x0: float, dx: float, n: int) -> np.ndarray:
    w = np.zeros(n)
    i0 = int(round(-x0 / dx))
    start = i0 % 2 if 0 <= i0 < n else 0
    stop = start + 2 * ((n - 1 - start) // 2)
    # Leftover end intervals (far tails) get the trapezoid rule.
    for lo, hi in ((0, start), (stop, n - 1)):
        if hi > lo:
            w[lo] += 0.5 * dx
            w[hi] += 0.5 * dx
    w[start:stop + 1:2] += 2.0 * dx / 3.0
    w[start + 1:stop:2] += 4.0 * dx / 3.0
    w[start] -= dx / 3.0
    w[stop] -= dx / 3.0
    return w


class Estimate(NamedTuple):
    value: float
    error: float


# ---------------------------------------------------------------------------
# Closed-form densities of the reference terms


def _partial_fractions(j: int, k: int):
    """1/(a^j b^k) with a + b = L as sums over a^-m and b^-m.

    Returns two lists of ``(m, power_of_L)`` coefficients' binomials.
    """
    a_terms = []
    b_terms = []
    if k == 0:
        return [(j, 1.0, 0)], []
    if j == 0:
        return [], [(k, 1.0, 0)]
    for m in range(1, j + 1):
        a_terms.append((m, binom(j + k - m - 1, k - 1), j + k - m))
    for m in range(1, k + 1):
        b_terms.append((m, binom(j + k - m - 1, j - 1), j + k - m))
    return a_terms, b_terms


def bilateral_gamma_int_pdf(j: int, k: int, lam_p: float, lam_m: float, y):
    """Density of Gamma(j, lam_p) - Gamma(k, lam_m) for integer shapes.

    cf is ``(lam_p/(lam_p - iz))^j (lam_m/(lam_m + iz))^k``.  At a jump
    (only possible at y = 0) the midpoint value is returned.
    """
    y = np.asarray(y, dtype=float)
    if j == 0 and k == 0:
        raise ValueError("the (0, 0) term is an atom, not a density")
    L = lam_p + lam_m
    scale = lam_p ** j * lam_m ** k
    a_terms, b_terms = _partial_fractions(j, k)
    out = np.zeros_like(y)
    pos, neg = y > 0, y < 0
    yp, yn = y[pos], -y[neg]
    right0 = left0 = 0.0
    for m, c, p in a_terms:
        coef = scale * c / L ** p
        out[pos] += coef * np.exp((m - 1) * np.log(yp) - lam_p * yp - gammaln(m)) if m > 1 \
            else coef * np.exp(-lam_p * yp)
        if m == 1:
            right0 += coef
    for m, c, p in b_terms:
        coef = scale * c / L ** p
        out[neg] += coef * np.exp((m - 1) * np.log(yn) - lam_m * yn - gammaln(m)) if m > 1 \
            else coef * np.exp(-lam_m * yn)
        if m == 1:
            left0 += coef
    out[y == 0] = 0.5 * (right0 + left0)
    return out


def reference_limits(law: LawCf):
    """(left, right) limits at 0 of the reference density."""
    left = right = 0.0
    for coef, j, k in law.refs:
        a_terms, b_terms = _partial_fractions(j, k)
        scale = law.lam_plus ** j * law.lam_minus ** k
        L = law.lam_plus + law.lam_minus
        right += sum(coef * scale * c / L ** p for m, c, p in a_terms if m == 1)
        left += sum(coef * scale * c / L ** p for m, c, p in b_terms if m == 1)
    return left, right


def reference_density(law: LawCf, y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    for coef, j, k in law.refs:
        out += coef * bilateral_gamma_int_pdf(j, k, law.lam_plus, law.lam_minus, y)
    return out


# ---------------------------------------------------------------------------
# Inversion

NEG_TOL = 1e-9
MASS_TOL = 1e-3
TAIL_RATES = 30.0


def default_window(law: LawCf):
    """(center, halfwidth): center kappa_1, halfwidth max(10 sd, 30/min lambda).

    30/lambda leaves about e^-30 of exponential tail outside the window.  For
    X_(t) the spread of the jump part does not shrink with t, so the
    halfwidth comes from X itself.
    """
    base = law_cf(law.params)
    k2 = base.cumulant(2)
    lams = [side.lam for _, side in law.params.sides()]
    return law.cumulant(1), max(10.0 * math.sqrt(k2), TAIL_RATES / min(lams))


def _as_law(cf_evaluator) -> LawCf:
    if isinstance(cf_evaluator, LawCf):
        return cf_evaluator
    if isinstance(cf_evaluator, TsdParams):
        return law_cf(cf_evaluator)
    return None


def _remainder(law, fn, z):
    out = fn(z)
    if law is not None:
        out = out - law.atom - law.reference_cf(z)
    return out


def _tail_size(law, fn, Z):
    z = Z * np.linspace(0.5, 1.0, 9)
    z = np.concatenate([z, -z])
    return float(np.max(np.abs(_remainder(law, fn, z))))


def density_grid(cf_evaluator: Union[LawCf, TsdParams, Callable], center: Optional[float] = None,
                 halfwidth: Optional[float] = None, n: int = 4096, *, max_n: int = 1 << 22,
                 tail_tol: float = 1e-12, fail_tol: float = 1e-6, strict: bool = True) -> GridFunction:
    """Invert a characteristic function onto a uniform grid.

    ``n`` is the starting size; it doubles until the inverted remainder is
    below ``tail_tol`` at the spectral cutoff, up to ``max_n``.  Above
    ``fail_tol`` at ``max_n`` the law is too rough for the grid and
    :class:`NumericalError` is raised.  A plain callable cf needs an explicit
    window.

    ``strict=False`` is for measures that are only paired with smooth
    functions: the grid then keeps its raw values (no clipping, no ringing or
    cutoff failure), so its discrete transform still equals the cf on every
    retained frequency.  Only the mass check remains.
    """
    if n < 256 or n & (n - 1):
        raise ValueError("n must be a power of two >= 256")
    law = _as_law(cf_evaluator)
    fn = law if law is not None else cf_evaluator
    if center is None or halfwidth is None:
        if law is None:
            raise ValueError("center and halfwidth are required for a plain cf callable")
        c0, h0 = default_window(law)
        center = c0 if center is None else center
        halfwidth = h0 if halfwidth is None else halfwidth
    if not halfwidth > 0:
        raise ValueError("halfwidth must be positive")

    tail = math.inf
    while True:
        dx = 2.0 * halfwidth / n
        Z = math.pi / dx
        tail = _tail_size(law, fn, Z)
        if tail <= tail_tol or n >= max_n:
            break
        n *= 2
    if strict and tail > fail_tol:
        raise NumericalError(
            f"cf remainder is {tail:.3g} at cutoff {Z:.3g} with n={n}; "
            "density too rough for the grid")

    retried = False
    while True:
        grid = _invert(law, fn, center, halfwidth, n)
        if not strict or grid.values.min() >= -NEG_TOL:
            break
        if retried or 2 * n > max_n:
            raise NumericalError(
                f"negative ringing {grid.values.min():.3g} persists at n={n}")
        n *= 2
        retried = True

    values, masses = grid.values, grid.masses
    if strict:
        values = np.clip(values, 0.0, None)
        masses = masses + grid.dx * (values - grid.values)
    brk, limits = -1, (0.0, 0.0)
    if law is not None and law.refs:
        brk = int(round(-grid.x0 / grid.dx))
        if 0 <= brk < n:
            left, right = reference_limits(law)
            smooth = values[brk] - 0.5 * (left + right)
            limits = (smooth + left, smooth + right)
            if strict:
                limits = (max(limits[0], 0.0), max(limits[1], 0.0))
        else:
            brk = -1
    out = GridFunction(grid.x0, grid.dx, values, atom=grid.atom, brk=brk, brk_limits=limits, masses=masses,
                       meta={"n": n, "tail": tail, "strict": strict, "label": getattr(law, "label", lambda: "cf")()})
    mass = out.mass()
    if abs(mass - 1.0) > MASS_TOL:
        raise NumericalError(f"grid mass {mass:.6f} outside [0.999, 1.001]; widen the window")
    return out


def _invert(law, fn, center, halfwidth, n) -> GridFunction:
    dx = 2.0 * halfwidth / n
    # Align so that y = 0 is a node: reference terms may jump there.
    x0 = dx * round((center - halfwidth) / dx)
    dz = 2.0 * math.pi / (n * dx)
    k = np.arange(n)
    z = (k - n // 2) * dz
    psi = _remainder(law, fn, z)
    spec = psi * np.exp(-1j * z * x0)
    vals = np.fft.fft(spec)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    g = (dz / (2.0 * math.pi)) * sign * vals.real
    atom = 0.0
    if law is not None:
        x = x0 + dx * k
        ref = reference_density(law, x)
        atom = law.atom
    else:
        ref = np.zeros(n)
    # The remainder is paired with uniform weights (its discrete transform is
    # then exactly the sampled cf); the closed-form part, which may kink or
    # jump at 0, with Simpson weights.
    masses = dx * g + simpson_weights(x0, dx, n) * ref
    return GridFunction(x0, dx, g + ref, atom=atom, masses=masses)


# ---------------------------------------------------------------------------
# CDF and expectations


def _side_cdf(x0, dx, v, x, base):
    # Simpson partial sums can dip by rounding where the density is ~0.
    cum = base + np.maximum.accumulate(integrate.cumulative_simpson(v, dx=dx, initial=0.0))
    return interpolate.PchipInterpolator(x0 + dx * np.arange(v.size), cum, extrapolate=False)(x), cum[-1]


def _grid_cdf(g: GridFunction, x):
    # Simpson on each side of the break, monotone cubic between nodes.
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.where(flat < g.x0, 0.0, 1.0)
    b = g.brk
    if 2 <= b <= g.n - 3:
        xb = g.x0 + b * g.dx
        lv = g.values[:b + 1].copy()
        lv[-1] = g.brk_limits[0]
        rv = g.values[b:].copy()
        rv[0] = g.brk_limits[1]
        m = flat <= xb
        vals, top = _side_cdf(g.x0, g.dx, lv, flat[m], 0.0)
        out[m] = np.where(flat[m] >= g.x0, vals, 0.0)
        m2 = ~m
        vals, total = _side_cdf(xb, g.dx, rv, flat[m2], top)
    else:
        vals, total = _side_cdf(g.x0, g.dx, g.values, flat, 0.0)
        m2 = np.ones(flat.shape, bool)
    inside = np.isfinite(vals)
    sub = out[m2]
    sub[inside] = vals[inside]
    sub[~inside & (flat[m2] > g.xmax)] = total
    out[m2] = sub
    if g.atom:
        out = out + g.atom * (flat >= 0)
    return np.clip(out, 0.0, 1.0).reshape(x.shape)


def _gil_pelaez(fn, x: float, split: float = 50.0) -> float:
    def body(z):
        if z == 0.0:
            return 0.0  # removable; integrand is bounded there
        return (np.exp(-1j * z * x) * fn(np.array([z]))[0]).imag / z

    head, _ = integrate.quad(body, 0.0, split, limit=800, epsabs=1e-11, epsrel=1e-10)
    if x == 0.0:
        tail, _ = integrate.quad(lambda z: fn(np.array([z]))[0].imag / z, split, np.inf,
                                 limit=800, epsabs=1e-11)
    else:
        w = abs(x)
        sgn = 1.0 if x > 0 else -1.0
        c, _ = integrate.quad(lambda z: fn(np.array([z]))[0].imag / z, split, np.inf,
                              weight="cos", wvar=w, limlst=200)
        s, _ = integrate.quad(lambda z: fn(np.array([z]))[0].real / z, split, np.inf,
                              weight="sin", wvar=w, limlst=200)
        tail = c - sgn * s
    return 0.5 - (head + tail) / math.pi


def cdf(dist: Union[GridFunction, LawCf, TsdParams, Callable], x):
    """CDF from a density grid, or by Gil-Pelaez inversion of a cf."""
    if isinstance(dist, GridFunction):
        return _grid_cdf(dist, x)
    fn = law_cf(dist) if isinstance(dist, TsdParams) else dist
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.array([_gil_pelaez(fn, float(xi)) for xi in xs])
    vals = np.clip(vals, 0.0, 1.0)
    return vals if np.ndim(x) else float(vals[0])


def expectation(g: GridFunction, h) -> Estimate:
    """E h(X) against a density grid (plus its atom at zero).

    The error bound is sup|h| on the grid span times the mass defect.
    """
    x = g.x
    hv = np.asarray(h(x), dtype=float)
    value = float(np.dot(g.point_masses(), hv))
    if g.atom:
        value += g.atom * float(np.asarray(h(np.array([0.0])), dtype=float)[0])
    err = float(np.max(np.abs(hv))) * abs(1.0 - g.mass())
    return Estimate(value, err)


def retransform(g: GridFunction, z):
    """cf of the grid law; used to check inversion consistency."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x, m = g.x, g.point_masses()
    out = np.empty(z.size, dtype=complex)
    rows = max(1, (1 << 22) // x.size)
    for a in range(0, z.size, rows):
        out[a:a + rows] = np.exp(1j * np.outer(z[a:a + rows], x)) @ m
    return out + g.atom
