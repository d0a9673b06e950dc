"""How many samples does a prediction need?"""
import numpy as np

from stackfit import AnalysisConfig, SampleSet, characterize

rng = np.random.default_rng(5)
x = rng.gamma(5, 2, 1_000_000)      # stand-in for a full distance stream
truth = {C: np.mean(x >= C) for C in (8, 16, 32)}

for n in (64, 256, 1024, 4096):
    step = x.size // n
    s = SampleSet(x[::step][:n], 1, step)
    c = characterize(s, 0.0, AnalysisConfig(min_cache_size=8, line_size=1))
    errs = [abs(c.tail(C) - t) for C, t in truth.items()]
    print(f"n={n:5d} worst abs error {max(errs):.4f}")
