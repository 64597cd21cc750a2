"""Deterministic, stream-splittable sampling for every distribution used here.

All samplers are pure functions of (params, RandomSource, count): the source
wraps a counter-mode generator keyed by (seed, stream_id), so identical
inputs give bit-identical output regardless of worker scheduling, and
distinct stream ids give statistically independent streams.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, ParameterError

_U64 = 1 << 64

# Purpose codes for substreams, so the same replication index never reuses
# a stream across roles.
STREAM_X = 1
STREAM_Y = 2
STREAM_PERM = 3
STREAM_BOOT = 4
STREAM_REF = 5

# Exact CDF tables are precomputed up to this support size; beyond it the
# table itself becomes the bottleneck and the artifact has no use case.
POWER_LAW_TABLE_LIMIT = 10**6


@dataclass(frozen=True)
class RandomSource:
    """A (seed, stream_id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < _U64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0 <= int(self.stream_id) < _U64:
            raise ParameterError(f"stream_id must be a 64-bit unsigned integer, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, *path: int) -> "RandomSource":
        """Derive a child stream by hash-chaining path components onto this id.

        One blake2b step per component, so substream(a, b) is the same stream
        as substream(a).substream(b); 64-bit digests make collisions between
        distinct derivation paths a non-issue in practice.
        """
        sid = int(self.stream_id)
        for part in path:
            part = int(part)
            if part < 0:
                raise ParameterError("substream path components must be nonnegative")
            h = hashlib.blake2b(digest_size=8)
            h.update(sid.to_bytes(8, "little"))
            h.update(part.to_bytes(8, "little"))
            sid = int.from_bytes(h.digest(), "little")
        return RandomSource(self.seed, sid)


@dataclass(frozen=True)
class StableParams:
    """Stable law with characteristic function exp{iuδ − γ^p|u|^p} for β=0."""

    p: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.p <= 2.0:
            raise ParameterError(f"stability order must lie in (0, 2], got {self.p}")
        if not -1.0 <= self.beta <= 1.0:
            raise ParameterError(f"skewness must lie in [-1, 1], got {self.beta}")
        if not self.gamma > 0.0:
            raise ParameterError(f"scale must be positive, got {self.gamma}")
        if not np.isfinite(self.delta):
            raise ParameterError(f"location must be finite, got {self.delta}")


@dataclass(frozen=True)
class ParetoLikeParams:
    """Pareto(a, x_min), optionally pushed through f(x) = x·max(ln|x|, 1)."""

    a: float
    x_min: float
    apply_transform: bool = False

    def __post_init__(self):
        if not self.a > 0.0:
            raise ParameterError(f"tail exponent must be positive, got {self.a}")
        if not self.x_min > 0.0:
            raise ParameterError(f"location must be positive, got {self.x_min}")

    def mean(self) -> float:
        """Analytic mean; a > 1 required, and x_min ≥ e for the transform."""
        if self.a <= 1.0:
            raise ParameterError("mean requires tail exponent > 1")
        if not self.apply_transform:
            return self.a * self.x_min / (self.a - 1.0)
        # E[X ln X] for X ~ Pareto(a, x_min); valid verbatim only when
        # ln x ≥ 1 on the whole support.
        if self.x_min < np.e:
            raise ParameterError("transformed mean requires x_min >= e")
        am1 = self.a - 1.0
        return float(self.a * self.x_min * (am1 * np.log(self.x_min) + 1.0) / (am1 * am1))


@dataclass(frozen=True)
class PowerLawCutoffParams:
    """Integer power law: mass at k proportional to k^(−τ) on {1, …, x_m}."""

    tau: float
    x_m: int

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ParameterError(f"exponent must be positive, got {self.tau}")
        if int(self.x_m) < 1:
            raise ParameterError(f"cutoff must be a positive integer, got {self.x_m}")
        if int(self.x_m) > POWER_LAW_TABLE_LIMIT:
            raise CapacityError(
                f"cutoff {self.x_m} exceeds the exact-table limit {POWER_LAW_TABLE_LIMIT}"
            )

    def exact_mean(self) -> float:
        """Σ k^(1−τ) / Σ k^(−τ) by direct summation over the support."""
        k = np.arange(1, int(self.x_m) + 1, dtype=np.float64)
        w = k ** (-self.tau)
        return float(np.sum(k * w) / np.sum(w))


def heavy_transform(x):
    """f(x) = x·max(ln|x|, 1), the variance-destroying transform."""
    x = np.asarray(x, dtype=np.float64)
    m = np.maximum(np.abs(x), 1.0)
    return x * np.maximum(np.log(m), 1.0)


def _require_count(count: int) -> int:
    count = int(count)
    if count < 1:
        raise ParameterError(f"count must be a positive integer, got {count}")
    return count


def sample_stable(params: StableParams, src: RandomSource, count: int) -> np.ndarray:
    """Chambers–Mallows–Stuck variates.

    For β=0 the centered unit variate has characteristic function
    exp{−|u|^p}; scale/location enter as X = γ·X0 + δ (plus the usual
    log correction in the skewed p=1 case).
    """
    count = _require_count(count)
    g = src.generator()
    phi = (g.random(count) - 0.5) * np.pi
    w = g.standard_exponential(count)
    p, beta, gamma, delta = params.p, params.beta, params.gamma, params.delta

    if beta == 0.0:
        if p == 1.0:
            x0 = np.tan(phi)
        else:
            x0 = (np.sin(p * phi) / np.cos(phi) ** (1.0 / p)) * (
                np.cos((1.0 - p) * phi) / w
            ) ** ((1.0 - p) / p)
        return gamma * x0 + delta

    if p == 1.0:
        half_pi = np.pi / 2.0
        x0 = (
            (half_pi + beta * phi) * np.tan(phi)
            - beta * np.log(half_pi * w * np.cos(phi) / (half_pi + beta * phi))
        ) / half_pi
        return gamma * x0 + (2.0 / np.pi) * beta * gamma * np.log(gamma) + delta

    t = beta * np.tan(np.pi * p / 2.0)
    b0 = np.arctan(t) / p
    s0 = (1.0 + t * t) ** (1.0 / (2.0 * p))
    x0 = (
        s0
        * np.sin(p * (phi + b0))
        / np.cos(phi) ** (1.0 / p)
        * (np.cos(phi - p * (phi + b0)) / w) ** ((1.0 - p) / p)
    )
    return gamma * x0 + delta


def pareto_like_inverse_cdf(params: ParetoLikeParams, u) -> np.ndarray:
    """Quantile function of the (optionally transformed) Pareto-like law."""
    u = np.asarray(u, dtype=np.float64)
    x = params.x_min * (1.0 - u) ** (-1.0 / params.a)
    return heavy_transform(x) if params.apply_transform else x


def sample_pareto_like(params: ParetoLikeParams, src: RandomSource, count: int) -> np.ndarray:
    count = _require_count(count)
    return pareto_like_inverse_cdf(params, src.generator().random(count))


@lru_cache(maxsize=8)
def _cutoff_cdf_table(tau: float, x_m: int) -> np.ndarray:
    k = np.arange(1, x_m + 1, dtype=np.float64)
    w = k ** (-tau)
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    cdf.setflags(write=False)
    return cdf


def power_law_cutoff_inverse_cdf(params: PowerLawCutoffParams, u) -> np.ndarray:
    """Smallest k with CDF(k) ≥ u; exact table plus binary search."""
    cdf = _cutoff_cdf_table(params.tau, int(params.x_m))
    u = np.asarray(u, dtype=np.float64)
    return np.searchsorted(cdf, u, side="left").astype(np.int64) + 1


def sample_power_law_cutoff(params: PowerLawCutoffParams, src: RandomSource, count: int) -> np.ndarray:
    count = _require_count(count)
    return power_law_cutoff_inverse_cdf(params, src.generator().random(count))


def sample_abelian(params, src: RandomSource, count: int) -> np.ndarray:
    """Inverse-CDF sampling over the tabulated Abelian PMF."""
    from .abelian import abelian_pmf_vector

    count = _require_count(count)
    cdf = np.cumsum(abelian_pmf_vector(params))
    cdf /= cdf[-1]
    u = src.generator().random(count)
    return np.searchsorted(cdf, u, side="left").astype(np.int64) + 1
