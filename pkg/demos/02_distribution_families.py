"""The four continuous families: moments, cdf, quantiles and sampling."""
import numpy as np

from stackfit import ContinuousModel, cdf, fit_error, mom_fit, moments, quantile, sample

rng = np.random.default_rng(1)

truth = [
    ContinuousModel("uniform", {"a": 2, "b": 8}),
    ContinuousModel("gamma", {"shape": 5, "scale": 2}),
    ContinuousModel("gpd", {"shape": 0.25, "scale": 1.5}),
    ContinuousModel("half_normal", {"scale": 1.0}),
]

for m in truth:
    x = sample(m, rng, size=200_000)
    fit = mom_fit(m.family, moments(x))       # invert mean and variance
    print(f"{m.family:12s} true={m.params} fit={ {k: round(v, 3) for k, v in fit.params.items()} }")

g = truth[1]
print("gamma cdf(10) =", cdf(g, 10.0))
print("gamma median  =", quantile(g, 0.5))
print("cdf on a grid:", np.round(cdf(g, np.array([2.0, 5.0, 10.0, 20.0])), 4))

# goodness of fit: quantile MSE at plotting positions, lower is better
x = sample(g, rng, size=5000)
for fam in ("uniform", "gamma", "gpd", "half_normal"):
    print(f"fit_error[{fam}] = {fit_error(mom_fit(fam, moments(x)), x):.4f}")
