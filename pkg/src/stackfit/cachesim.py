"""Brute-force fully-associative LRU cache, used as ground truth."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .stackdist import DistanceSequence, to_line_addresses


@dataclass(frozen=True)
class SimResult:
    accesses: int
    hits: int
    compulsory_misses: int
    capacity_misses: int

    @property
    def capacity_miss_ratio(self) -> float:
        """Capacity misses over non-compulsory accesses."""
        warm = self.accesses - self.compulsory_misses
        return self.capacity_misses / warm if warm else 0.0


def simulate_lines(lines, capacity: int) -> SimResult:
    """Run the LRU cache over line addresses with room for ``capacity`` lines."""
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    seq = lines.tolist() if isinstance(lines, np.ndarray) else list(lines)
    cache = OrderedDict()
    seen = set()
    hits = cold = cap = 0
    for line in seq:
        if line in cache:
            cache.move_to_end(line)
            hits += 1
            continue
        if line in seen:
            cap += 1
        else:
            seen.add(line)
            cold += 1
        cache[line] = None
        if len(cache) > capacity:
            cache.popitem(last=False)
    return SimResult(len(seq), hits, cold, cap)


def simulate_lru(seq, cache) -> SimResult:
    """Simulate ``seq`` (an AccessSequence) on ``cache`` (a CacheConfig)."""
    return simulate_lines(to_line_addresses(seq, cache.line_size), cache.capacity)


def empirical_miss_ratio(d: DistanceSequence, capacity: int) -> float:
    """Share of finite distances that are >= ``capacity``."""
    finite = d.finite
    if finite.size == 0:
        raise ValueError("no finite distances")
    return float(np.count_nonzero(finite >= capacity)) / finite.size
