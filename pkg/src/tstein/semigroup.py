"""The self-decomposability semigroup P_t, its generator, and the Stein-equation solver.

P_t h(x) = E h(x e^-t + X_(t)), where X_(t) has cf phi(z)/phi(e^-t z).  The
inner law is a density grid (plus an atom at 0 when beta = 0), so P_t of a
function sampled on a lattice is a discrete correlation.

The solution of A f = h - E h(X) and its derivatives are

    f_h^(k)(x) = -int_0^1 s^k P_{-log s}[h^(k+1)](x) ds,

evaluated with Gauss-Legendre nodes in s.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import roots_legendre

from . import _kernels
from .density import GridFunction, density_grid, expectation
from .errors import NumericalError
from .levy_cf import law_cf
from .params import TsdParams, special_case_of, validate
from .stein_op import SteinOperatorSpec, stein_apply
from .testfunctions import TestFunction

T_NODES = 64
CACHE_SIZE = 256
# Inner laws of the solver are only paired with smooth h^(k+1), so they use
# unclipped grids (see density_grid's strict flag) of bounded size.
SOLVER_GRID = {"tail_tol": 1e-10, "max_n": 1 << 16, "strict": False}


class LawCache:
    """LRU cache of inner-law density grids keyed by (params, t, grid options)."""

    def __init__(self, maxsize: int = CACHE_SIZE):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = self.misses = 0

    def get(self, params: TsdParams, t: float, **grid_kw) -> GridFunction:
        key = (params, float(t), tuple(sorted(grid_kw.items())))
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                return self._data[key]
            self.misses += 1
        g = density_grid(law_cf(params, t), **grid_kw)
        with self._lock:
            self._data[key] = g
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        return g

    def __len__(self):
        return len(self._data)


_default_cache = LawCache()


def inner_law(params: TsdParams, t: float, cache: Optional[LawCache] = None, **grid_kw) -> GridFunction:
    """Density grid of X_(t) (with its atom at 0)."""
    if t <= 0:
        raise ValueError("X_(t) is degenerate for t <= 0")
    return (_default_cache if cache is None else cache).get(params, t, **grid_kw)


def _kernel(g: GridFunction, cut: float = 1e-18):
    """Nodes y_j and weights w_j g_j with negligible mass trimmed from the ends."""
    wg = g.point_masses()
    big = np.flatnonzero(np.abs(wg) > cut * np.abs(wg).max())
    lo, hi = big[0], big[-1] + 1
    return g.x0 + g.dx * lo, wg[lo:hi]


def _eval(h, x):
    return np.asarray(h(x), dtype=float)


def pt_apply(params: TsdParams, h, t: float, x, cache: Optional[LawCache] = None):
    """P_t h(x).  ``h`` is a vectorized callable or a GridFunction."""
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return _eval(h, x)
    g = inner_law(params, t, cache)
    y0, wg = _kernel(g)
    s = math.exp(-t)
    xs = (x * s).ravel()
    shifts = y0 + g.dx * np.arange(wg.size)
    if isinstance(h, GridFunction):
        out = _kernels.shifted_sum(h.x0, h.dx, h.values, xs, shifts, wg)
    else:
        rows = max(1, (1 << 22) // wg.size)
        out = np.empty(xs.size)
        for a in range(0, xs.size, rows):
            out[a:a + rows] = _eval(h, xs[a:a + rows, None] + shifts[None, :]) @ wg
    if g.atom:
        out = out + g.atom * _eval(h, xs)
    return out.reshape(x.shape)


def pt_lattice(g: GridFunction, h, s: float, xmin: float, xmax: float):
    """P_t h on the lattice of the inner grid covering [s xmin, s xmax].

    Returns ``(u0, values)`` with values at ``u0 + i dx``, excluding the atom.
    """
    y0, wg = _kernel(g)
    dx = g.dx
    u0 = dx * (math.floor(s * xmin / dx) - 2)
    m = int(math.ceil((s * xmax - u0) / dx)) + 3
    hv = _eval(h, u0 + y0 + dx * np.arange(m + wg.size - 1))
    return u0, fftconvolve(hv, wg[::-1], mode="valid")


def pt_grid(params: TsdParams, h, t: float, xmin: float, xmax: float, n: int,
            cache: Optional[LawCache] = None) -> GridFunction:
    """P_t h on the uniform grid of n points on [xmin, xmax]."""
    x = np.linspace(xmin, xmax, n)
    if t == 0:
        vals = _eval(h, x)
    else:
        g = inner_law(params, t, cache)
        s = math.exp(-t)
        u0, q = pt_lattice(g, h, s, xmin, xmax)
        vals = _kernels.cubic_eval(u0, g.dx, q, s * x) + g.atom * _eval(h, s * x)
    return GridFunction(xmin, x[1] - x[0], vals)


def generator_fd(params: TsdParams, f, x, t: float = 1e-3, cache: Optional[LawCache] = None):
    """(P_t f(x) - f(x))/t, a finite-difference proxy for the generator."""
    return (pt_apply(params, f, t, x, cache) - _eval(f, x)) / t


# ---------------------------------------------------------------------------
# Stein equation


@dataclass(frozen=True, eq=False)
class SteinSolution:
    params: TsdParams
    h: TestFunction
    f: GridFunction  # derivs hold f', f'', f'''
    eh: float
    nodes: int
    meta: dict = field(default_factory=dict)

    def grid(self, k: int) -> np.ndarray:
        return self.f.values if k == 0 else self.f.derivs[k - 1]

    def residual(self, x, nodes: int = 64, on_error: str = "raise"):
        """A f_h(x) - (h(x) - E h(X)).

        Near the grid ends the constant extrapolation of f_h puts a kink in
        reach of the quadrature; ``on_error="nan"`` masks such points.
        """
        spec = SteinOperatorSpec(self.params, nodes)
        return stein_apply(spec, self.f, x, on_error=on_error) - (self.h(x) - self.eh)


def expect_h(params: TsdParams, h) -> float:
    """E h(X) for smooth h; the grid pairing stays exact without a clean pointwise density."""
    g = density_grid(law_cf(params), tail_tol=1e-10, max_n=1 << 18, strict=False)
    return expectation(g, h).value


def _t_nodes(nodes: int):
    s, w = roots_legendre(nodes)
    return 0.5 * (s + 1.0), 0.5 * w


def solve_stein(params: TsdParams, h: TestFunction, xmin: float = -16.0, xmax: float = 16.0,
                n: int = 1601, orders: int = 3, nodes: int = T_NODES, threads: int = 1,
                cache: Optional[LawCache] = None) -> SteinSolution:
    """Grid solution f_h and derivative grids up to ``orders`` (<= 3).

    Each s-node needs the density of X_(t) at t = -log s; if that inversion
    fails the error names the node's t.
    """
    validate(params)
    if not 0 <= orders <= 3:
        raise ValueError("orders must be in 0..3")
    if h.order < orders + 1:
        raise ValueError(f"h needs derivatives up to order {orders + 1}")
    if n < 8 or not xmax > xmin:
        raise ValueError("bad solver grid")
    cache = _default_cache if cache is None else cache
    x = np.linspace(xmin, xmax, n)
    s_nodes, s_weights = _t_nodes(nodes)

    def node_terms(i):
        s = s_nodes[i]
        t = -math.log(s)
        try:
            g = inner_law(params, t, cache, **SOLVER_GRID)
        except NumericalError as exc:
            raise NumericalError(f"inner law at t={t:.6g} (s-node {i}): {exc}") from exc
        out = []
        for k in range(orders + 1):
            hk = (lambda kk: (lambda z: h.d(kk + 1, z)))(k)
            u0, q = pt_lattice(g, hk, s, xmin, xmax)
            vals = _kernels.cubic_eval(u0, g.dx, q, s * x) + g.atom * hk(s * x)
            out.append(s_weights[i] * s ** k * vals)
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            terms = list(pool.map(node_terms, range(nodes)))
    else:
        terms = [node_terms(i) for i in range(nodes)]
    # Fixed summation order keeps results independent of scheduling.
    grids = [-sum(tr[k] for tr in terms) for k in range(orders + 1)]

    eh = expect_h(params, h)
    f = GridFunction(xmin, x[1] - x[0], grids[0], tuple(grids[1:]))
    meta = {"s_nodes": nodes, "rule": "gauss-legendre in s=exp(-t)", "cache": len(cache)}
    return SteinSolution(params, h, f, eh, nodes, meta)


def potential(params: TsdParams, h: TestFunction, xmin: float, xmax: float, n: int,
              nodes: int = T_NODES, cache: Optional[LawCache] = None) -> GridFunction:
    """g_h(x) = -int_0^inf (P_t h(x) - E h(X)) dt on a grid; its derivative is f_h."""
    eh = expect_h(params, h)
    s_nodes, s_weights = _t_nodes(nodes)
    acc = np.zeros(n)
    for s, w in zip(s_nodes, s_weights):
        p = pt_grid(params, h, -math.log(s), xmin, xmax, n, cache).values
        acc -= w * (p - eh) / s
    return GridFunction(xmin, (xmax - xmin) / (n - 1), acc)


# ---------------------------------------------------------------------------
# Bound checks


@dataclass(frozen=True)
class BoundCheck:
    name: str
    measured: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.measured

    @property
    def ok(self) -> bool:
        return self.slack >= 0


def check_bounds(sol: SteinSolution, lipschitz_reach: float = 2.0) -> List[BoundCheck]:
    """Measured sup-norms of f_h, ..., f_h''' against ||h^(k+1)||/(k+1), the
    Lipschitz bound on f_h'' over grid pairs within ``lipschitz_reach``, and
    for symmetric beta = 0 laws the bound on sup |x f_h''(x)|.
    """
    h = sol.h
    out = []
    avail = 1 + len(sol.f.derivs)
    for k in range(avail):
        out.append(BoundCheck(f"sup|f^({k})| <= ||h^({k + 1})||/{k + 1}",
                              float(np.max(np.abs(sol.grid(k)))), h.norm(k + 1) / (k + 1)))
    if avail >= 3:
        f2 = sol.grid(2)
        dx = sol.f.dx
        worst = 0.0
        for d in range(1, int(lipschitz_reach / dx + 1e-9) + 1):
            worst = max(worst, float(np.max(np.abs(f2[d:] - f2[:-d]))) / (d * dx))
        out.append(BoundCheck("|f''(x)-f''(y)| <= ||h^(4)||/4 |x-y|", worst, h.norm(4) / 4))
        if special_case_of(sol.params) in ("symmetric-vg", "laplace"):
            alpha, lam = sol.params.alpha_plus, sol.params.lambda_plus
            x = sol.f.x
            out.append(BoundCheck("sup|x f''(x)| <= 2(||h''|| + alpha/(3 lam) ||h'''||)",
                                  float(np.max(np.abs(x * f2))),
                                  2.0 * (h.norm(2) + alpha / (3.0 * lam) * h.norm(3))))
    return out
