"""Samplers for TSD laws and the composite variables used by the experiments.

Reproducibility: draws are produced in chunks of ``CHUNK`` values, and chunk
``c`` always uses the Philox stream keyed by ``(seed, stream, c)``.  Chunks can
therefore run on any number of threads and the concatenated output is
identical to a single-threaded run.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np
from scipy.special import gamma as gamma_fn

from .params import Side, TsdParams, validate

log = logging.getLogger(__name__)

CHUNK = 1 << 16
MAX_REJECTIONS = 10 ** 6


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray
    seed: int
    spec: str
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def mean_stderr(self) -> Tuple[float, float]:
        v = self.values
        return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


@dataclass(frozen=True)
class ChaosSpec:
    """G = sum_i lam_i (N_i^2 - 1) for i.i.d. standard normals N_i."""

    eigenvalues: Tuple[float, ...]

    def __post_init__(self):
        ev = tuple(float(v) for v in self.eigenvalues)
        object.__setattr__(self, "eigenvalues", ev)
        if not ev or not any(ev):
            raise ValueError("a chaos spec needs at least one nonzero eigenvalue")


def rng_stream(seed: int, chunk: int, stream: int = 0) -> np.random.Generator:
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, chunk))))


def run_chunks(n: int, seed: int, draw: Callable, threads: int = 1, stream: int = 0) -> np.ndarray:
    """Concatenate ``draw(gen, size)`` over chunks; the last axis is the sample axis."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    sizes = [min(CHUNK, n - a) for a in range(0, n, CHUNK)]

    def job(c):
        return np.asarray(draw(rng_stream(seed, c, stream), sizes[c]), dtype=float)

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    if not parts:
        return np.empty(0)
    return np.concatenate(parts, axis=-1)


# ---------------------------------------------------------------------------
# One-sided laws


def sample_gamma(alpha: float, lam: float, n: int, seed: int, threads: int = 1, stream: int = 0) -> SampleSet:
    """Gamma with shape alpha and rate lam (mean alpha/lam)."""
    if not (alpha > 0 and lam > 0):
        raise ValueError("alpha and lambda must be positive")
    vals = run_chunks(n, seed, lambda g, m: g.gamma(alpha, 1.0 / lam, m), threads, stream)
    return SampleSet(vals, seed, f"gamma(alpha={alpha!r},lam={lam!r});numpy-gamma")


def positive_stable(gen: np.random.Generator, beta: float, size: int) -> np.ndarray:
    """Kanter's representation of S with E exp(-s S) = exp(-s^beta)."""
    u = gen.uniform(0.0, math.pi, size)
    e = gen.exponential(1.0, size)
    a = (np.sin(beta * u) ** (beta / (1.0 - beta)) * np.sin((1.0 - beta) * u)
         / np.sin(u) ** (1.0 / (1.0 - beta)))
    return (a / e) ** ((1.0 - beta) / beta)


def tempered_stable_pieces(side: Side) -> int:
    """Number of i.i.d. pieces the side is split into; each accepts with prob >= e^-1."""
    c = -side.alpha * gamma_fn(-side.beta)
    return max(1, math.ceil(c * side.lam ** side.beta))


def _tempered_side(gen: np.random.Generator, side: Side, size: int, stats: dict) -> np.ndarray:
    if side.beta == 0.0:
        return gen.gamma(side.alpha, 1.0 / side.lam, size)
    # Laplace exponent c((lam + s)^beta - lam^beta) with c = -alpha Gamma(-beta) > 0.
    # Tilting the stable law exp(-c s^beta) by e^{-lam x} gives the tempered law,
    # so a stable proposal is accepted with probability e^{-lam S}.  The total
    # acceptance e^{-c lam^beta} can be tiny, so alpha is split into m pieces.
    m = tempered_stable_pieces(side)
    c_piece = -side.alpha * gamma_fn(-side.beta) / m
    scale = c_piece ** (1.0 / side.beta)
    p_acc = math.exp(-c_piece * side.lam ** side.beta)
    need = size * m
    got = []
    have = proposed = accepted = since_accept = 0
    while have < need:
        batch = 1024 + int(1.05 * (need - have) / p_acc)
        s = scale * positive_stable(gen, side.beta, batch)
        keep = gen.uniform(size=batch) < np.exp(-side.lam * s)
        proposed += batch
        idx = np.flatnonzero(keep)
        accepted += idx.size
        if idx.size == 0:
            since_accept += batch
            if since_accept >= MAX_REJECTIONS:
                raise RuntimeError(f"tempered stable rejection: {since_accept} consecutive rejections")
            continue
        since_accept = batch - 1 - idx[-1]
        acc = s[idx][:need - have]
        got.append(acc)
        have += acc.size
    stats["proposed"] = stats.get("proposed", 0) + proposed
    stats["accepted"] = stats.get("accepted", 0) + accepted
    return np.concatenate(got).reshape(size, m).sum(axis=1)


def sample_tsd(params: TsdParams, n: int, seed: int, threads: int = 1, stream: int = 0) -> SampleSet:
    """X = X+ - X- with independent one-sided parts."""
    validate(params)
    stats: dict = {}

    def draw(gen, m):
        out = np.zeros(m)
        for sign, side in params.sides():
            out += sign * _tempered_side(gen, side, m, stats)
        return out

    vals = run_chunks(n, seed, draw, threads, stream)
    meta = {}
    if stats:
        meta["acceptance_rate"] = stats["accepted"] / stats["proposed"]
        log.info("tempered stable rejection acceptance %.4f for %s", meta["acceptance_rate"], params.label())
    return SampleSet(vals, seed, f"{params.label()};sides=gamma|tilted-kanter", meta)


# ---------------------------------------------------------------------------
# Geometric sums and equilibrium transforms


@dataclass(frozen=True)
class YSpec:
    """Summand law for geometric sums: two_point (+-a), uniform on [-a, a], or laplace (scale a)."""

    kind: str
    a: float

    def __post_init__(self):
        if self.kind not in ("two_point", "uniform", "laplace"):
            raise ValueError(f"unknown summand law {self.kind!r}")
        if not self.a > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def matched(cls, kind: str, lam: float) -> "YSpec":
        """Scale chosen so Var Y = 2/lam^2, the Laplace(0, 1/lam^2) variance."""
        a = {"two_point": math.sqrt(2.0), "uniform": math.sqrt(6.0), "laplace": 1.0}[kind] / lam
        return cls(kind, a)

    @property
    def variance(self) -> float:
        return {"two_point": 1.0, "uniform": 1.0 / 3.0, "laplace": 2.0}[self.kind] * self.a ** 2

    @property
    def rho(self) -> float:
        """E|Y|^3."""
        return {"two_point": 1.0, "uniform": 0.25, "laplace": 6.0}[self.kind] * self.a ** 3

    def sum_of(self, gen: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """Sums of counts[i] i.i.d. copies of Y."""
        a = self.a
        if self.kind == "two_point":
            return a * (2.0 * gen.binomial(counts, 0.5) - counts)
        if self.kind == "laplace":
            c = counts.astype(float)
            return a * (gen.gamma(c, 1.0) - gen.gamma(c, 1.0))
        u = gen.uniform(-a, a, int(counts.sum()))
        return np.bincount(np.repeat(np.arange(counts.size), counts), weights=u, minlength=counts.size)

    def equilibrium(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Draws of the centered equilibrium transform Y^L."""
        a = self.a
        if self.kind == "laplace":
            return gen.laplace(0.0, a, size)  # Laplace is its own equilibrium law
        w = gen.uniform(size=size)
        if self.kind == "two_point":
            return triangular_inverse_cdf(a, w)
        v = a * (1.0 - gen.uniform(size=size) ** (1.0 / 3.0))  # density 3(a-v)^2/a^3 on [0, a]
        return np.where(w < 0.5, -v, v)


def triangular_inverse_cdf(a: float, w):
    """Inverse CDF of the density (a - |u|)/a^2 on [-a, a]."""
    w = np.asarray(w, dtype=float)
    return np.where(w < 0.5, -a + a * np.sqrt(2.0 * w), a - a * np.sqrt(2.0 * (1.0 - w)))


def _geometric_counts(gen, p, size):
    return gen.geometric(p, size) - 1  # N_p starts at 0


def sample_geometric_sum(p: float, y_spec: YSpec, n: int, seed: int, threads: int = 1,
                         stream: int = 0) -> SampleSet:
    """S_p = sqrt(p) * sum_{k <= N_p} Y_k with P(N_p = k) = p (1 - p)^k."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")

    def draw(gen, m):
        return math.sqrt(p) * y_spec.sum_of(gen, _geometric_counts(gen, p, m))

    vals = run_chunks(n, seed, draw, threads, stream)
    return SampleSet(vals, seed, f"geosum(p={p!r},{y_spec.kind},a={y_spec.a!r})")


def sample_geometric_sum_coupled(p: float, y_spec: YSpec, n: int, seed: int, threads: int = 1,
                                 stream: int = 0) -> Tuple[SampleSet, SampleSet]:
    """(S_p, S_p^L) with S_p^L = sqrt(p) (sum_{k <= N_p} Y_k + Y^L_{N_p + 1})."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    r = math.sqrt(p)

    def draw(gen, m):
        s = r * y_spec.sum_of(gen, _geometric_counts(gen, p, m))
        return np.stack([s, s + r * y_spec.equilibrium(gen, m)])

    both = run_chunks(n, seed, draw, threads, stream)
    tag = f"(p={p!r},{y_spec.kind},a={y_spec.a!r})"
    return SampleSet(both[0], seed, "geosum" + tag), SampleSet(both[1], seed, "geosum-equilibrium" + tag)


def sample_equilibrium_two_point(a: float, n: int, seed: int, threads: int = 1, stream: int = 0) -> SampleSet:
    """Triangular law (a - |u|)/a^2 on [-a, a], by inverse CDF."""
    if not a > 0:
        raise ValueError("a must be positive")
    vals = run_chunks(n, seed, lambda g, m: triangular_inverse_cdf(a, g.uniform(size=m)), threads, stream)
    return SampleSet(vals, seed, f"triangular(a={a!r});inverse-cdf")


def sample_equilibrium(y_spec: YSpec, n: int, seed: int, threads: int = 1, stream: int = 0) -> SampleSet:
    vals = run_chunks(n, seed, y_spec.equilibrium, threads, stream)
    return SampleSet(vals, seed, f"equilibrium({y_spec.kind},a={y_spec.a!r})")


def sample_second_chaos(chaos: ChaosSpec, n: int, seed: int, threads: int = 1, stream: int = 0) -> SampleSet:
    lam = np.asarray(chaos.eigenvalues)

    def draw(gen, m):
        z = gen.standard_normal((m, lam.size))
        return (z * z - 1.0) @ lam

    vals = run_chunks(n, seed, draw, threads, stream)
    return SampleSet(vals, seed, f"chaos{chaos.eigenvalues}")
