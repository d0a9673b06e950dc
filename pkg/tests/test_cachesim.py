import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackfit import (
    COLD,
    CacheConfig,
    DistanceSequence,
    compute_distances,
    empirical_miss_ratio,
    gen_cyclic,
    simulate_lines,
    simulate_lru,
    to_line_addresses,
)


def test_cycle_fits():
    r = simulate_lines(to_line_addresses(gen_cyclic(3, 300, 64), 64), 3)
    assert (r.compulsory_misses, r.hits, r.capacity_misses) == (3, 297, 0)
    r = simulate_lru(gen_cyclic(4, 300, 64), CacheConfig(4 * 64, 64))
    assert (r.compulsory_misses, r.hits, r.capacity_misses) == (4, 296, 0)


def test_cycle_thrashes():
    r = simulate_lines(to_line_addresses(gen_cyclic(3, 300, 64), 64), 2)
    assert (r.compulsory_misses, r.capacity_misses, r.hits) == (3, 297, 0)


def test_byte_addresses_fold_to_lines():
    r = simulate_lru(gen_cyclic(4, 100, 16), CacheConfig(64, 64))
    assert r.compulsory_misses == 1 and r.hits == 99


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 40), max_size=400), st.integers(1, 64))
def test_simulator_matches_distances(lines, capacity):
    r = simulate_lines(lines, capacity)
    d = compute_distances(lines)
    assert r.hits + r.compulsory_misses + r.capacity_misses == r.accesses == len(lines)
    assert r.compulsory_misses == len(set(lines))
    assert r.capacity_misses == int(np.sum(d.finite >= capacity))


def test_capacity_misses_shrink_with_capacity():
    lines = np.random.default_rng(0).integers(0, 500, 20_000)
    misses = [simulate_lines(lines, c).capacity_misses for c in (1, 2, 4, 8, 16, 64, 256, 512)]
    assert all(a >= b for a, b in zip(misses, misses[1:]))
    assert misses[-1] == 0


def test_empirical_miss_ratio():
    d = DistanceSequence([COLD, 2, 2, 2])
    assert empirical_miss_ratio(d, 3) == 0.0
    assert empirical_miss_ratio(d, 2) == 1.0
    with pytest.raises(ValueError):
        empirical_miss_ratio(DistanceSequence([COLD]), 1)


def test_empirical_ratio_equals_simulator_ratio():
    lines = np.random.default_rng(5).integers(0, 300, 30_000)
    d = compute_distances(lines)
    for c in (1, 7, 64, 299):
        assert empirical_miss_ratio(d, c) == simulate_lines(lines, c).capacity_miss_ratio
