"""Model predictions next to an exact LRU simulation."""
import numpy as np

from stackfit import (AnalysisConfig, CacheConfig, characterize, compute_distances,
                      cold_stats, gen_random_uniform, miss_ratio, sample_distances, simulate_lru, sweep,
                      to_line_addresses)

ls = 64
seq = gen_random_uniform(512, 100_000, line_size=ls, seed=4)
d = compute_distances(to_line_addresses(seq, ls))

# every 10th access is enough for a usable fit
s = sample_distances(d, interval=10, offset=0, line_size=ls)
cold, total = cold_stats(d)
c = characterize(s, cold / total, AnalysisConfig(min_cache_size=ls * 8, line_size=ls))
print("model:", c.continuous.family if c.continuous else "discrete only")

print(f"{'cache':>8} {'model':>8} {'lru':>8}")
for cs, r in sweep(c, ls * 8, ls * 1024):
    sim = simulate_lru(seq, CacheConfig(cs, ls))
    print(f"{cs:8d} {r:8.4f} {sim.capacity_miss_ratio:8.4f}")

print(miss_ratio(c, CacheConfig(16 * 1024, ls)))
