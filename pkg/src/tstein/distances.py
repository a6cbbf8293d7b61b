"""Empirical W1 distances and dictionary lower estimates of d_{W_r}.

For any dictionary certified for H_r, the largest mean difference over its
entries is a lower bound for d_{W_r}, up to Monte Carlo error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .density import GridFunction, expectation
from .testfunctions import Dictionary, default_dictionary


def _values(x) -> np.ndarray:
    v = np.asarray(getattr(x, "values", x), dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty sample")
    return v


def _downsample(sorted_vals: np.ndarray, m: int) -> np.ndarray:
    """m order statistics at the mid-quantiles of a larger sorted sample."""
    idx = np.floor((np.arange(m) + 0.5) * sorted_vals.size / m).astype(np.int64)
    return sorted_vals[idx]


def wasserstein1(xs, ys) -> float:
    """Mean absolute difference of the sorted samples (the larger one is thinned first)."""
    a, b = np.sort(_values(xs)), np.sort(_values(ys))
    if a.size > b.size:
        a = _downsample(a, b.size)
    elif b.size > a.size:
        b = _downsample(b, a.size)
    return float(np.mean(np.abs(a - b)))


def wasserstein1_vs_reference(xs, cdf: Callable, points: int = 4096) -> float:
    """int |F_n - F| over the sample span padded by 8 sample sd, by trapezoid."""
    a = np.sort(_values(xs))
    pad = 8.0 * a.std() if a[-1] > a[0] else 1.0
    grid = np.linspace(a[0] - pad, a[-1] + pad, points)
    fn = np.searchsorted(a, grid, side="right") / a.size
    return float(np.trapezoid(np.abs(fn - np.asarray(cdf(grid), dtype=float)), grid))


@dataclass(frozen=True)
class EntryDiff:
    name: str
    diff: float  # mean h(xs) - E_ref h
    stderr: float


@dataclass(frozen=True)
class Discrepancy:
    """Dictionary lower estimate of d_{W_r}: the largest |diff| and its stderr."""

    value: float
    stderr: float
    max_stderr: float
    r: int
    entries: Tuple[EntryDiff, ...]

    @property
    def argmax(self) -> EntryDiff:
        return max(self.entries, key=lambda e: abs(e.diff))


Reference = Union[GridFunction, Callable, np.ndarray, object]


def _reference_mean(reference, h, span) -> Tuple[float, float]:
    if isinstance(reference, GridFunction):
        return expectation(reference, h).value, 0.0
    if callable(reference):
        # A CDF: Stieltjes sum of h at cell midpoints.
        lo, hi = span
        x = np.linspace(lo, hi, 20001)
        F = np.asarray(reference(x), dtype=float)
        dF = np.diff(F)
        mid = 0.5 * (x[1:] + x[:-1])
        return float(dF @ h(mid) + F[0] * h(np.array([lo]))[0] + (1 - F[-1]) * h(np.array([hi]))[0]), 0.0
    v = _values(reference)
    hv = h(v)
    return float(hv.mean()), float(hv.std(ddof=1) / np.sqrt(v.size))


def smooth_discrepancy(xs, reference: Reference, r: int = 3,
                       dictionary: Optional[Dictionary] = None) -> Discrepancy:
    """max over dictionary entries of |mean h(xs) - E_ref h|.

    ``reference`` is a density grid (exact expectations), a CDF callable, or
    a second sample (its Monte Carlo error is added in quadrature).
    """
    d = dictionary or default_dictionary(r)
    if d.r < r:
        raise ValueError(f"dictionary is certified for H_{d.r}, not H_{r}")
    x = _values(xs)
    pad = 8.0 * x.std()
    span = (x.min() - pad, x.max() + pad)
    rows: List[EntryDiff] = []
    for h in d:
        hv = h(x)
        ref, ref_se = _reference_mean(reference, h, span)
        se = float(np.hypot(hv.std(ddof=1) / np.sqrt(x.size), ref_se))
        rows.append(EntryDiff(h.name, float(hv.mean()) - ref, se))
    top = max(rows, key=lambda e: abs(e.diff))
    return Discrepancy(abs(top.diff), top.stderr, max(e.stderr for e in rows), r, tuple(rows))
