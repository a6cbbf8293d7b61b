"""Levy density, characteristic exponent, characteristic functions and cumulants of TSD.

The exponent is evaluated in closed form per side::

    beta = 0:  -alpha * log(1 - i z / lam)                (Frullani)
    beta > 0:  alpha * Gamma(-beta) * ((lam - i z)^beta - lam^beta)

with z negated on the minus side.  Principal branches are safe because
``lam - i z`` always lies in the right half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import binom, gamma as gamma_fn

from .params import TsdParams


def levy_density(params: TsdParams, u):
    """Density of the Levy measure at ``u`` (zero on an absent side)."""
    u = np.asarray(u, dtype=float)
    if np.any(u == 0):
        raise ValueError("Levy density is not defined at u = 0")
    out = np.zeros_like(u)
    for sign, side in params.sides():
        a = sign * u
        mask = a > 0
        au = a[mask]
        out[mask] = side.alpha * au ** (-1.0 - side.beta) * np.exp(-side.lam * au)
    return out if out.ndim else float(out)


def k_function(params: TsdParams, u):
    """Signed ``k(u) = u * nu(u)``; strictly decreasing on each half-line."""
    u = np.asarray(u, dtype=float)
    return u * levy_density(params, u)


def _side_exponent(side, z):
    w = side.lam - 1j * z
    if side.beta == 0.0:
        return -side.alpha * np.log(w / side.lam)
    return side.alpha * gamma_fn(-side.beta) * (w ** side.beta - side.lam ** side.beta)


def cf_exponent(params: TsdParams, z):
    """eta(z) = int (e^{izu} - 1) nu(du), so that cf = exp(eta)."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape, dtype=complex)
    for sign, side in params.sides():
        out += _side_exponent(side, sign * z)
    return out if out.ndim else complex(out)


def cf(params: TsdParams, z):
    return np.exp(cf_exponent(params, z))


def cf_t(params: TsdParams, z, t: float):
    """cf of X_(t): phi(z) / phi(e^{-t} z), computed as one exponential."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    z = np.asarray(z, dtype=float)
    if t == 0:
        return np.ones(z.shape, dtype=complex) if z.ndim else 1.0 + 0j
    return np.exp(cf_exponent(params, z) - cf_exponent(params, math.exp(-t) * z))


def cumulant(params: TsdParams, m: int) -> float:
    """kappa_m = int u^m nu(du)."""
    if m < 1:
        raise ValueError("cumulant order must be >= 1")
    total = 0.0
    for sign, side in params.sides():
        total += (sign ** m) * side.alpha * gamma_fn(m - side.beta) * side.lam ** (side.beta - m)
    return float(total)


def cumulant_t(params: TsdParams, m: int, t: float) -> float:
    """Cumulants of X_(t); log cf_t(z) = eta(z) - eta(e^{-t} z)."""
    return cumulant(params, m) * (1.0 - math.exp(-m * t))


# ---------------------------------------------------------------------------
# Law objects consumed by the Fourier inversion


RefTerm = Tuple[float, int, int]


@dataclass(frozen=True)
class LawCf:
    """A cf plus the structure the inverter needs.

    ``atom`` is the mass at zero (the limit of the cf at infinity) and
    ``refs`` lists ``(coef, j, k)`` terms ``coef * w+^j * w-^k`` with
    ``w+ = lam+/(lam+ - iz)`` and ``w- = lam-/(lam- + iz)``.  Those terms have
    closed-form densities (differences of integer-shape gammas) and carry the
    nonsmooth part of the law; the inverter Fourier-inverts only what is left.
    """

    params: TsdParams
    t: Optional[float] = None
    atom: float = 0.0
    refs: Tuple[RefTerm, ...] = ()

    def __call__(self, z):
        if self.t is None:
            return cf(self.params, z)
        return cf_t(self.params, z, self.t)

    @property
    def lam_plus(self) -> float:
        return self.params.lambda_plus if self.params.plus is not None else 1.0

    @property
    def lam_minus(self) -> float:
        return self.params.lambda_minus if self.params.minus is not None else 1.0

    def cumulant(self, m: int) -> float:
        if self.t is None:
            return cumulant(self.params, m)
        return cumulant_t(self.params, m, self.t)

    def reference_cf(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape, dtype=complex)
        if not self.refs:
            return out
        wp = self.lam_plus / (self.lam_plus - 1j * z)
        wm = self.lam_minus / (self.lam_minus + 1j * z)
        for coef, j, k in self.refs:
            out += coef * wp ** j * wm ** k
        return out

    def label(self) -> str:
        base = self.params.label()
        return base if self.t is None else f"{base}_(t={self.t:g})"


# Terms are dropped once their coefficient would make the subtraction lose
# more than about four digits to cancellation.
_MAX_REF_COEF = 1e4
_REF_ORDER = 3


def _side_series(alpha: float, s: float, order: int):
    """Taylor coefficients in w of (s + (1 - s) w)^alpha."""
    coefs = []
    for k in range(order + 1):
        if s == 0.0:
            c = 1.0 if k == alpha else 0.0
        else:
            c = binom(alpha, k) * s ** (alpha - k) * (1.0 - s) ** k
        coefs.append(float(c))
    return coefs


def law_cf(params: TsdParams, t: Optional[float] = None) -> LawCf:
    """Law of X (``t=None``) or of X_(t) with its atom and singular terms."""
    if t is not None and t < 0:
        raise ValueError("t must be nonnegative")
    if not params.all_beta_zero:
        # Some side has beta > 0: the cf decays like exp(-c|z|^beta), no atom.
        return LawCf(params, t)

    def side_alpha(side):
        return None if side is None else side.alpha

    ap, am = side_alpha(params.plus), side_alpha(params.minus)
    if t is None or math.isinf(t):
        integral = all(a is None or float(a).is_integer() for a in (ap, am))
        if not integral:
            return LawCf(params, t)
        j = 0 if ap is None else int(ap)
        k = 0 if am is None else int(am)
        return LawCf(params, t, 0.0, ((1.0, j, k),))

    s = math.exp(-t)
    sp = [1.0] if ap is None else _side_series(ap, s, _REF_ORDER)
    sm = [1.0] if am is None else _side_series(am, s, _REF_ORDER)
    atom = sp[0] * sm[0]
    refs = []
    for j, cj in enumerate(sp):
        for k, ck in enumerate(sm):
            if j == 0 and k == 0:
                continue
            c = cj * ck
            if c != 0.0 and abs(c) <= _MAX_REF_COEF:
                refs.append((c, j, k))
    return LawCf(params, t, atom, tuple(refs))
