"""Split atoms from the continuum, fit, refine and serialize."""
import numpy as np

from stackfit import AnalysisConfig, Characterization, SampleSet, characterize, refined_fit

rng = np.random.default_rng(2)

# half the samples sit on one distance, the rest follow Gamma(5, 2)
x = np.where(rng.random(10_000) < 0.5, 10.0, rng.gamma(5, 2, 10_000))
cfg = AnalysisConfig(min_cache_size=8, line_size=1, seed=2)
c, diag = characterize(SampleSet(x), 0.0, cfg, return_diagnostics=True)

print("atoms:", c.discrete.atoms, "weight", round(c.discrete.total_weight, 3))
print("continuous:", c.continuous.family, {k: round(v, 3) for k, v in c.continuous.params.items()})
print(diag.summary())

js = c.to_json()
print(len(js), "bytes:", js)
assert Characterization.from_json(js) == c

# refinement on a tail that continues the bulk
n = 2048
y = np.where(rng.random(n) < 0.9, rng.uniform(0, 50, n), 50 + rng.gamma(2, 30, n))
_, diag = refined_fit(y, AnalysisConfig(min_cache_size=50, line_size=1, seed=0))
print("eps_up by round:", [round(e, 2) for e in diag.eps_up])
print("families by round:", diag.families)
