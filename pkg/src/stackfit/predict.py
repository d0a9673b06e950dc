"""Miss-ratio prediction from a characterization.

An access with distance ``d`` misses in a fully-associative LRU cache of
``C`` lines iff ``d >= C`` (distances count the lines strictly between
reuses). Cold accesses are not part of the ratio; they are carried
separately as ``Characterization.cold_fraction``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .characterize import Characterization
from .errors import LineSizeMismatch
from .stackdist import outline


def _is_pow2(n):
    return n >= 1 and not n & (n - 1)


@dataclass(frozen=True)
class CacheConfig:
    cache_size: int
    line_size: int = 64

    def __post_init__(self):
        if not (_is_pow2(self.cache_size) and _is_pow2(self.line_size)):
            raise ValueError(f"cache and line sizes must be powers of two: {self}")
        if self.cache_size < self.line_size:
            raise ValueError("cache smaller than one line")

    @property
    def capacity(self) -> int:
        return self.cache_size // self.line_size


@dataclass(frozen=True)
class PredictionResult:
    capacity_miss_ratio: float
    capacity_lines: int
    line_size: int
    # capacity below the refinement floor min_cache_size / line_size
    below_threshold: bool = False


def miss_ratio(c: Characterization, cache: CacheConfig) -> PredictionResult:
    if cache.line_size != c.line_size:
        raise LineSizeMismatch(
            f"characterization has line size {c.line_size}, cache has {cache.line_size}")
    C = cache.capacity
    return PredictionResult(c.tail(C), C, c.line_size, C < c.threshold_lines)


def _pow2_range(lo, hi):
    out = []
    cs = lo
    while cs <= hi:
        out.append(cs)
        cs <<= 1
    return out


def sweep(c: Characterization, cs_min: int, cs_max: int) -> list[tuple[int, float]]:
    """Miss ratio at every power-of-two cache size in ``[cs_min, cs_max]``."""
    if cs_min > cs_max:
        raise ValueError("cs_min > cs_max")
    CacheConfig(cs_min, c.line_size)
    CacheConfig(cs_max, c.line_size)
    return [(cs, miss_ratio(c, CacheConfig(cs, c.line_size)).capacity_miss_ratio)
            for cs in _pow2_range(cs_min, cs_max)]


def monte_carlo_outline(c: Characterization, n: int, seed: int = 0) -> np.ndarray:
    """``n`` draws from the characterization, sorted descending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return outline(c.draw(n, np.random.default_rng(seed)))


def divergence(a: Characterization, b: Characterization, cs_min: int, cs_max: int) -> float:
    """Largest absolute miss-ratio gap between two characterizations over a sweep."""
    return max(abs(ra - rb) for _, ra, rb in compare_sweeps(a, b, cs_min, cs_max))


def compare_sweeps(a, b, cs_min, cs_max):
    if a.line_size != b.line_size:
        raise LineSizeMismatch(f"line sizes differ: {a.line_size} vs {b.line_size}")
    sa = sweep(a, cs_min, cs_max)
    sb = sweep(b, cs_min, cs_max)
    return [(cs, ra, rb) for (cs, ra), (_, rb) in zip(sa, sb)]


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _emit(text, sink):
    if sink is None:
        return text
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)
    return None


def sweep_csv(rows, sink=None):
    lines = ["cache_size,miss_ratio"] + [f"{cs},{r!r}" for cs, r in rows]
    return _emit("\n".join(lines) + "\n", sink)


def outline_csv(empirical, model=None, sink=None):
    """``rank,distance`` rows; a ``model`` outline adds a third column."""
    def fmt(v):
        v = float(v)
        return str(int(v)) if v.is_integer() else repr(v)

    if model is None:
        lines = ["rank,distance"]
        lines += [f"{i},{fmt(v)}" for i, v in enumerate(empirical, 1)]
    else:
        if len(model) != len(empirical):
            raise ValueError("empirical and model outlines differ in length")
        lines = ["rank,distance,model"]
        lines += [f"{i},{fmt(v)},{fmt(m)}" for i, (v, m) in enumerate(zip(empirical, model), 1)]
    return _emit("\n".join(lines) + "\n", sink)
