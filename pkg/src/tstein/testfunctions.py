"""Smooth test functions with certified derivative sup-norms, and dictionaries of them.

A :class:`TestFunction` bundles ``h, h', ..., h^(K)`` with sup-norms that are
true upper bounds.  Sinusoid norms are exact; logistic functions are
polynomials in the logistic sigmoid ``s`` (using ``s' = s(1 - s)``), so their
norms are exact maxima of a polynomial on [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite as H
from scipy.special import binom, expit

MAX_ORDER = 5
_CHECK_X = np.linspace(-40.0, 40.0, 40001)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """h with derivatives ``derivs[k]`` for k = 0..K and sup-norms ``norms[k]``.

    ``norms`` is None for helper functions that are only used as ``f`` in
    Stein identities and need no certificate.
    """

    __test__ = False  # keep pytest from collecting it

    name: str
    derivs: Tuple[Callable, ...]
    norms: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.norms is not None:
            # Certified norms must dominate the function on a dense grid.
            for k, (fk, nk) in enumerate(zip(self.derivs, self.norms)):
                peak = float(np.max(np.abs(fk(_CHECK_X))))
                if peak > nk * (1 + 1e-9) + 1e-14:
                    raise ValueError(f"{self.name}: certified norm of order {k} is too small")

    def __call__(self, x):
        return self.derivs[0](np.asarray(x, dtype=float))

    def d(self, k: int, x):
        if k >= len(self.derivs):
            raise ValueError(f"{self.name} has no derivative of order {k}")
        return self.derivs[k](np.asarray(x, dtype=float))

    def norm(self, k: int) -> float:
        if self.norms is None:
            raise ValueError(f"{self.name} carries no certified norms")
        return self.norms[k]

    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    def scaled(self, c: float, name: Optional[str] = None) -> "TestFunction":
        derivs = tuple((lambda f: (lambda x: c * f(x)))(f) for f in self.derivs)
        norms = None if self.norms is None else tuple(abs(c) * v for v in self.norms)
        return TestFunction(name or f"{c:g}*{self.name}", derivs, norms)

    def in_class(self, r: int) -> bool:
        """Membership certificate for H_r: norms of orders 0..r at most 1."""
        return self.norms is not None and all(v <= 1.0 + 1e-12 for v in self.norms[:r + 1])


# ---------------------------------------------------------------------------
# Builders


def sinusoid(omega: float, phi: float = 0.0, c: float = 1.0) -> TestFunction:
    def make(k):
        return lambda x: c * omega ** k * np.sin(omega * x + phi + k * math.pi / 2)

    derivs = tuple(make(k) for k in range(MAX_ORDER + 1))
    norms = tuple(abs(c) * omega ** k for k in range(MAX_ORDER + 1))
    return TestFunction(f"sin(w={omega:g},phi={phi:g},c={c:g})", derivs, norms)


def _poly_sup(p: Polynomial) -> float:
    cands = [0.0, 1.0]
    if p.degree() > 1:
        cands += [r.real for r in p.deriv().roots() if abs(r.imag) < 1e-12 and 0 <= r.real <= 1]
    return float(max(abs(p(c)) for c in cands))


def logistic(poly: Polynomial, a: float = 1.0, m: float = 0.0, name: str = "logistic") -> TestFunction:
    """x -> P(s(a(x - m))) with s the logistic sigmoid."""
    ds = Polynomial([0.0, 1.0, -1.0])  # s' = s(1 - s)
    polys = [poly]
    for _ in range(MAX_ORDER):
        polys.append(a * polys[-1].deriv() * ds)

    def make(q):
        return lambda x: q(expit(a * (np.asarray(x, dtype=float) - m)))

    derivs = tuple(make(q) for q in polys)
    norms = tuple(_poly_sup(q) for q in polys)
    return TestFunction(name, derivs, norms)


def logistic_bump(a: float = 1.0, m: float = 0.0) -> TestFunction:
    """4 s(1 - s) at scale a: a smooth bump of height 1 centred at m."""
    return logistic(Polynomial([0.0, 4.0, -4.0]), a, m, f"bump(a={a:g},m={m:g})")


def tanh_step(a: float = 1.0) -> TestFunction:
    """tanh(a x) = 2 s(2 a x) - 1."""
    return logistic(Polynomial([-1.0, 2.0]), 2.0 * a, 0.0, f"tanh(a={a:g})")


def gaussian() -> TestFunction:
    """e^{-x^2}; d^k e^{-x^2} = (-1)^k H_k(x) e^{-x^2} (physicists' Hermite)."""
    def make(k):
        coef = [0.0] * k + [(-1.0) ** k]
        return lambda x: H.hermval(x, coef) * np.exp(-np.asarray(x, dtype=float) ** 2)

    derivs = tuple(make(k) for k in range(MAX_ORDER + 1))
    x = np.linspace(-8.0, 8.0, 400001)
    norms = tuple(float(np.max(np.abs(f(x)))) * (1 + 1e-6) for f in derivs)
    return TestFunction("gauss", derivs, norms)


def sin_exp() -> TestFunction:
    """sin(x) e^{-x}; each derivative adds sqrt(2) and a 3pi/4 phase.  Unbounded on the left."""
    def make(k):
        return lambda x: 2 ** (k / 2) * np.exp(-x) * np.sin(x + 0.75 * math.pi * k)

    return TestFunction("sin_exp", tuple(make(k) for k in range(MAX_ORDER + 1)))


def sin_gauss() -> TestFunction:
    """sin(x) e^{-x^2} by the Leibniz rule."""
    g = gaussian()

    def make(k):
        def f(x):
            return sum(binom(k, j) * np.sin(x + j * math.pi / 2) * g.d(k - j, x) for j in range(k + 1))
        return f

    return TestFunction("sin_gauss", tuple(make(k) for k in range(MAX_ORDER + 1)))


def constant(c: float = 1.0) -> TestFunction:
    def zero(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    derivs = (lambda x: np.full_like(np.asarray(x, dtype=float), c),) + (zero,) * MAX_ORDER
    return TestFunction(f"const({c:g})", derivs, (abs(c),) + (0.0,) * MAX_ORDER)


def polynomial(coefs: Sequence[float]) -> TestFunction:
    p = Polynomial(coefs)
    derivs = tuple((lambda q: (lambda x: q(np.asarray(x, dtype=float))))(p.deriv(k))
                   for k in range(MAX_ORDER + 1))
    return TestFunction(f"poly{tuple(coefs)}", derivs)


def normalize(h: TestFunction, r: int) -> TestFunction:
    """Scale h into H_r: divide by the largest certified norm of order <= r."""
    top = max(h.norms[:r + 1])
    return h if top <= 1.0 else h.scaled(1.0 / top, f"{h.name}/{top:.4g}")


# ---------------------------------------------------------------------------
# Dictionaries

OMEGAS = (0.25, 0.5, 1.0, 2.0, 4.0)
PHASES = (0.0, math.pi / 2)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Ordered test functions, each certified to lie in H_r."""

    r: int
    entries: Tuple[TestFunction, ...]

    def __post_init__(self):
        for h in self.entries:
            if not h.in_class(self.r):
                raise ValueError(f"{h.name} is not certified for H_{self.r}")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def default_dictionary(r: int, bumps: bool = True) -> Dictionary:
    """Sinusoids c sin(w x + phi) with c = min(1, w^-r), plus normalized logistic bumps."""
    if r < 0 or r > MAX_ORDER:
        raise ValueError(f"r must be in 0..{MAX_ORDER}")
    entries = [sinusoid(w, phi, min(1.0, w ** (-r))) for w in OMEGAS for phi in PHASES]
    if bumps:
        for a in (0.5, 1.0):
            for m in (-1.0, 0.0, 1.0):
                entries.append(normalize(logistic_bump(a, m), r))
    return Dictionary(r, tuple(entries))


def builtin(name: str) -> TestFunction:
    """Named functions for the CLI: gauss, sin_exp, sin_gauss, tanh, bump, sin:<w>[:<phi>]."""
    fixed = {"gauss": gaussian, "sin_exp": sin_exp, "sin_gauss": sin_gauss,
             "tanh": tanh_step, "bump": logistic_bump}
    if name in fixed:
        return fixed[name]()
    if name.startswith("sin:"):
        parts = name.split(":")[1:]
        try:
            omega = float(parts[0])
            phi = float(parts[1]) if len(parts) > 1 else 0.0
        except (ValueError, IndexError):
            raise ValueError(f"bad sinusoid spec {name!r}; use sin:<omega>[:<phi>]") from None
        return sinusoid(omega, phi, min(1.0, omega ** -4))
    raise ValueError(f"unknown builtin function {name!r}")
