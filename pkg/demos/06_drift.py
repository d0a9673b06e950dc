"""Compare two windows of one trace, and two different workloads."""
from stackfit import (AnalysisConfig, Characterization, ContinuousModel, DiscreteComponent,
                      characterize, compute_distances, divergence,
                      gen_from_distance_model, sample_distances, to_line_addresses)
from stackfit.predict import compare_sweeps

ls = 64
cfg = AnalysisConfig(min_cache_size=ls * 8, line_size=ls)


def model(family, params):
    return Characterization(DiscreteComponent(), ContinuousModel(family, params), 1.0, 1, ls)


def fit(seq, window=None):
    d = compute_distances(to_line_addresses(seq, ls))
    return characterize(sample_distances(d, 1, 0, ls, window=window), 0.0, cfg)


seq = gen_from_distance_model(model("gamma", {"shape": 2, "scale": 40}), 100_000, seed=1)
a, b = fit(seq, (0, 50_000)), fit(seq, (50_000, 100_000))
print("same workload, two halves:", round(divergence(a, b, ls, ls << 10), 4))

u = fit(gen_from_distance_model(model("uniform", {"a": 0, "b": 200}), 50_000, seed=2))
print("different workload:", round(divergence(a, u, ls, ls << 10), 4))
for row in compare_sweeps(a, u, ls * 16, ls * 256):
    print(row)
