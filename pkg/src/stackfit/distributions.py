"""Continuous families for stack-distance fitting.

Four families are supported, each with a method-of-moments estimator, a
closed-form (or special-function) cdf and quantile, and a seeded sampler:

================  ===================  ==========================================
family            params               MoM inversion from (mean m, variance v)
================  ===================  ==========================================
``uniform``       a, b                 a, b = m -/+ sqrt(3 v)
``gamma``         shape k, scale theta k = m^2 / v, theta = v / m
``gpd``           shape xi, scale s    xi = (1 - m^2 / v) / 2, s = m (1 - xi)
``half_normal``   scale s              s = m sqrt(pi / 2)
================  ===================  ==========================================

The generalized Pareto location is fixed at zero. Half-normal matches the
first moment only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DegenerateFitError

UNIFORM = "uniform"
GAMMA = "gamma"
GPD = "gpd"
HALF_NORMAL = "half_normal"
# Order doubles as the tie-break order for model selection.
FAMILIES = (UNIFORM, GAMMA, GPD, HALF_NORMAL)

PARAM_NAMES = {
    UNIFORM: ("a", "b"),
    GAMMA: ("shape", "scale"),
    GPD: ("shape", "scale"),
    HALF_NORMAL: ("scale",),
}

_XI_ZERO = 1e-12
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    count: int


@dataclass(frozen=True)
class ContinuousModel:
    """A fitted family. ``heavy_tail`` marks a GPD with shape >= 0.5
    (infinite variance); such models are kept but flagged."""

    family: str
    params: dict = field(hash=False)
    heavy_tail: bool = field(default=False, init=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        names = PARAM_NAMES[self.family]
        if set(self.params) != set(names):
            raise ValueError(f"{self.family} needs params {names}, got {sorted(self.params)}")
        p = {k: float(self.params[k]) for k in names}
        object.__setattr__(self, "params", p)
        if self.family == UNIFORM and not p["a"] < p["b"]:
            raise ValueError("uniform needs a < b")
        positive = ("shape", "scale") if self.family == GAMMA else ("scale",)
        if any(p[k] <= 0 for k in positive if k in p):
            raise ValueError(f"{self.family} parameters must be positive: {p}")
        if self.family == GPD:
            object.__setattr__(self, "heavy_tail", p["shape"] >= 0.5)

    @property
    def support(self) -> tuple[float, float]:
        p = self.params
        if self.family == UNIFORM:
            return p["a"], p["b"]
        if self.family == GPD and p["shape"] < 0:
            return 0.0, -p["scale"] / p["shape"]
        return 0.0, math.inf

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params)}

    def __repr__(self):
        args = ", ".join(f"{k}={v:.6g}" for k, v in self.params.items())
        return f"ContinuousModel({self.family}: {args})"


def moments(samples) -> Moments:
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("moments of an empty sample")
    mean = float(x.mean())
    var = float(np.mean((x - mean) ** 2))
    return Moments(mean, var, int(x.size))


def mom_fit(family: str, m: Moments) -> ContinuousModel:
    """Method-of-moments estimate of ``family`` from ``m``.

    Raises DegenerateFitError when the moments admit no valid parameters:
    zero variance (the data is one atom) or, for the families supported on
    [0, inf), a non-positive mean.
    """
    mean, var = m.mean, m.variance
    if not var > 0:
        raise DegenerateFitError(f"{family} fit needs positive variance (a single repeated value)")
    if family == HALF_NORMAL:
        if mean <= 0:
            raise DegenerateFitError("half_normal needs a positive mean")
        return ContinuousModel(HALF_NORMAL, {"scale": mean * math.sqrt(math.pi / 2)})
    if family == UNIFORM:
        half = math.sqrt(3.0 * var)
        return ContinuousModel(UNIFORM, {"a": mean - half, "b": mean + half})
    if mean <= 0:
        raise DegenerateFitError(f"{family} needs a positive mean")
    if family == GAMMA:
        return ContinuousModel(GAMMA, {"shape": mean * mean / var, "scale": var / mean})
    if family == GPD:
        xi = 0.5 * (1.0 - mean * mean / var)
        return ContinuousModel(GPD, {"shape": xi, "scale": mean * (1.0 - xi)})
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# cdf / quantile
# ---------------------------------------------------------------------------

def _scalar_out(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _cdf_scalar(model: ContinuousModel, x: float) -> float:
    p = model.params
    if model.family == UNIFORM:
        return min(max((x - p["a"]) / (p["b"] - p["a"]), 0.0), 1.0)
    if x <= 0:
        return 0.0
    if model.family == GAMMA:
        return float(special.gammainc(p["shape"], x / p["scale"]))
    if model.family == HALF_NORMAL:
        return math.erf(x / (p["scale"] * _SQRT2))
    xi, s = p["shape"], p["scale"]
    if abs(xi) < _XI_ZERO:
        return -math.expm1(-x / s)
    t = xi * x / s
    if t <= -1.0:
        return 1.0
    return -math.expm1(-math.log1p(t) / xi)


def cdf(model: ContinuousModel, x):
    """P(X <= x). Accepts scalars or arrays."""
    if isinstance(x, (int, float)):
        return _cdf_scalar(model, float(x))
    p = model.params
    xa = np.asarray(x, dtype=float)
    if model.family == UNIFORM:
        out = np.clip((xa - p["a"]) / (p["b"] - p["a"]), 0.0, 1.0)
    elif model.family == GAMMA:
        out = special.gammainc(p["shape"], np.maximum(xa, 0.0) / p["scale"])
    elif model.family == HALF_NORMAL:
        out = special.erf(np.maximum(xa, 0.0) / (p["scale"] * _SQRT2))
    else:
        xi, s = p["shape"], p["scale"]
        z = np.maximum(xa, 0.0) / s
        if abs(xi) < _XI_ZERO:
            out = -np.expm1(-z)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                t = 1.0 + xi * z
                out = np.where(t > 0, -np.expm1(-np.log1p(xi * z) / xi), 1.0)
    out = np.where(xa < 0, 0.0, out) if model.family != UNIFORM else out
    return _scalar_out(x, out)


def _ppf(model: ContinuousModel, q):
    """Quantile on [0, 1) without argument checks."""
    p = model.params
    q = np.asarray(q, dtype=float)
    if model.family == UNIFORM:
        return p["a"] + q * (p["b"] - p["a"])
    if model.family == GAMMA:
        return p["scale"] * special.gammaincinv(p["shape"], q)
    if model.family == HALF_NORMAL:
        return p["scale"] * _SQRT2 * special.erfinv(q)
    xi, s = p["shape"], p["scale"]
    if abs(xi) < _XI_ZERO:
        return -s * np.log1p(-q)
    return s * np.expm1(-xi * np.log1p(-q)) / xi


def quantile(model: ContinuousModel, p):
    """Inverse cdf for ``0 < p < 1``."""
    pa = np.asarray(p, dtype=float)
    if np.any((pa <= 0) | (pa >= 1)) or np.any(np.isnan(pa)):
        raise ValueError("quantile needs 0 < p < 1")
    return _scalar_out(p, _ppf(model, pa))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample(model: ContinuousModel, rng: np.random.Generator, size=None):
    """Draw from ``model``. Gamma uses numpy's exact generator, the others
    inverse-cdf sampling."""
    if model.family == GAMMA:
        return rng.gamma(model.params["shape"], model.params["scale"], size=size)
    u = rng.random(size)
    return _scalar_out(u, _ppf(model, u))


def sample_below(model: ContinuousModel, threshold: float, rng: np.random.Generator,
                 size=None):
    """Draw from ``model`` conditioned on ``X < threshold``.

    Uses ``quantile(u * cdf(threshold))``; the rare draw that rounds up to
    the threshold is redrawn, so every value returned is strictly below it.
    """
    top = cdf(model, threshold)
    if not top > 0:
        raise ValueError(f"cdf at {threshold} is 0: cannot condition on X < {threshold}")
    n = 1 if size is None else int(np.prod(size))
    out = np.asarray(_ppf(model, rng.random(n) * top), dtype=float)
    bad = ~(out < threshold)
    while bad.any():
        out[bad] = _ppf(model, rng.random(int(bad.sum())) * top)
        bad = ~(out < threshold)
    if size is None:
        return float(out[0])
    return out.reshape(size)


# ---------------------------------------------------------------------------
# goodness of fit
# ---------------------------------------------------------------------------

def plotting_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def quantile_residuals(model: ContinuousModel, samples) -> tuple[np.ndarray, np.ndarray]:
    """Sorted samples and squared gaps to model quantiles at (i - 0.5)/n."""
    x = np.sort(np.asarray(samples, dtype=float))
    q = _ppf(model, plotting_positions(x.size))
    return x, (x - q) ** 2


def fit_error(model: ContinuousModel, samples) -> float:
    """Mean squared gap between sorted samples and model quantiles."""
    if np.size(samples) < 2:
        raise ValueError("fit_error needs at least two samples")
    _, sq = quantile_residuals(model, samples)
    return float(sq.mean())
