"""Turn a sample set into a compact program characterization.

Pipeline: split frequent values off as discrete atoms, fit the residual
with each candidate family by moments, keep the one with the smallest
quantile MSE, then refine toward the upper tail. Refinement replaces every
sample below ``min_cache_size / line_size`` by a draw from the current
model conditioned below that threshold, and refits; samples above the
threshold are never touched, so successive fits concentrate on the part
of the distribution that decides misses for realistic caches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from .distributions import ContinuousModel
from .errors import DegenerateFitError
from .stackdist import SampleSet
from .trace import DATA, KINDS

AUTO = "auto"
JSON_VERSION = 1


@dataclass(frozen=True)
class AnalysisConfig:
    min_cache_size: int
    line_size: int = 64
    refinement_rounds: int = 3
    atom_threshold: float = 0.01
    families: str | tuple = AUTO
    seed: int = 0

    def __post_init__(self):
        ls = self.line_size
        if ls < 1 or ls & (ls - 1):
            raise ValueError(f"line size must be a power of two, got {ls}")
        if self.min_cache_size < ls:
            raise ValueError("min_cache_size must be >= line_size")
        if self.min_cache_size % ls:
            raise ValueError("min_cache_size must be a multiple of line_size")
        if not 0 < self.atom_threshold < 1:
            raise ValueError("atom_threshold must lie in (0, 1)")
        if self.refinement_rounds < 0:
            raise ValueError("refinement_rounds must be >= 0")
        if self.families != AUTO:
            fams = (self.families,) if isinstance(self.families, str) else tuple(self.families)
            unknown = set(fams) - set(dist.FAMILIES)
            if not fams or unknown:
                raise ValueError(f"unknown families {sorted(unknown) or fams}")
            object.__setattr__(self, "families", fams)

    @property
    def threshold_lines(self) -> int:
        return self.min_cache_size // self.line_size

    @property
    def candidates(self) -> tuple:
        return dist.FAMILIES if self.families == AUTO else self.families


@dataclass(frozen=True)
class DiscreteComponent:
    """Atoms as parallel arrays; ``probs`` sum to 1 within the component and
    ``total_weight`` is the share of all samples the atoms account for."""

    values: tuple = ()
    probs: tuple = ()
    total_weight: float = 0.0

    def __post_init__(self):
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs differ in length")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("atom values must be strictly increasing")
        if self.values and abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError("atom probabilities must sum to 1")
        if not 0.0 <= self.total_weight <= 1.0:
            raise ValueError("total_weight must lie in [0, 1]")

    def __len__(self):
        return len(self.values)

    @property
    def atoms(self):
        return list(zip(self.values, self.probs))


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() else v


def _atoms_of(values, counts, total):
    kept = int(np.sum(counts))
    if kept == 0:
        return DiscreteComponent()
    probs = (np.asarray(counts, dtype=float) / kept).tolist()
    return DiscreteComponent(tuple(_num(v) for v in values), tuple(probs), kept / total)


def split_discrete(s, atom_threshold: float = 0.01):
    """Pull out every value holding at least ``atom_threshold`` of the samples.

    Returns ``(DiscreteComponent, residual)``; the residual keeps sample order.
    """
    x = np.asarray(s.samples if isinstance(s, SampleSet) else s)
    if x.size == 0:
        raise ValueError("cannot split an empty sample set")
    values, counts = np.unique(x, return_counts=True)
    frequent = counts >= atom_threshold * x.size
    component = _atoms_of(values[frequent], counts[frequent], x.size)
    residual = x[~np.isin(x, values[frequent])]
    return component, residual


def fit_best(samples, families=AUTO):
    """Moment-fit each family and keep the one with the least quantile MSE.

    Ties go to the earlier family in ``distributions.FAMILIES`` order.
    Raises DegenerateFitError if no family can be fitted.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise DegenerateFitError("need at least two samples to fit")
    if families == AUTO:
        families = dist.FAMILIES
    elif isinstance(families, str):
        families = (families,)
    m = dist.moments(x)
    best, best_err = None, math.inf
    for fam in sorted(families, key=dist.FAMILIES.index):
        try:
            model = dist.mom_fit(fam, m)
        except DegenerateFitError:
            continue
        err = dist.fit_error(model, x)
        if err < best_err:
            best, best_err = model, err
    if best is None:
        raise DegenerateFitError(f"no family in {tuple(families)} fits these samples")
    return best, best_err


def bias(samples, model: ContinuousModel, threshold_lines: float, rng) -> np.ndarray:
    """Replace each sample below the threshold with a model draw below it."""
    x = np.array(samples, dtype=float)
    low = x < threshold_lines
    n_low = int(low.sum())
    if n_low:
        x[low] = dist.sample_below(model, threshold_lines, rng, size=n_low)
    return x


@dataclass
class RefinementDiagnostics:
    """Per fit (initial fit first, then one per round): the family chosen,
    its quantile MSE, and that error split into the contributions of sorted
    samples at or above the threshold (``eps_up``) and below it
    (``eps_down``), so that ``eps_up + eps_down == error``."""

    threshold_lines: float
    families: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    eps_up: list = field(default_factory=list)
    eps_down: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def record(self, model, samples, skipped=False):
        x, sq = dist.quantile_residuals(model, samples)
        up = x >= self.threshold_lines
        n = x.size
        self.families.append(model.family)
        self.errors.append(float(sq.mean()))
        self.eps_up.append(float(sq[up].sum() / n))
        self.eps_down.append(float(sq[~up].sum() / n))
        self.skipped.append(skipped)

    def __len__(self):
        return len(self.errors)

    def summary(self) -> str:
        rows = [f"round {i}: {fam:<11} error={e:.6g} eps_up={u:.6g} eps_down={d:.6g}"
                + ("  (bias skipped)" if s else "")
                for i, (fam, e, u, d, s) in enumerate(zip(
                    self.families, self.errors, self.eps_up, self.eps_down, self.skipped))]
        return "\n".join(rows)


def refined_fit(samples, config: AnalysisConfig, rng=None):
    """Initial best fit followed by ``config.refinement_rounds`` bias/refit rounds.

    Under ``families="auto"`` the family is re-selected each round; an
    explicit family list is searched once and the winner held fixed.
    Returns ``(model, diagnostics)``.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    t = config.threshold_lines
    x = np.asarray(samples, dtype=float)
    model, _ = fit_best(x, config.candidates)
    diag = RefinementDiagnostics(t)
    diag.record(model, x)
    families = config.candidates if config.families == AUTO else (model.family,)
    for _ in range(config.refinement_rounds):
        try:
            x = bias(x, model, t, rng)
        except ValueError:
            diag.record(model, x, skipped=True)
            continue
        model, _ = fit_best(x, families)
        diag.record(model, x)
    return model, diag


# ---------------------------------------------------------------------------
# characterization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Characterization:
    """Mixture of discrete atoms and at most one continuous family.

    Holds no samples: evaluating it costs O(number of atoms).
    """

    discrete: DiscreteComponent
    continuous: ContinuousModel | None
    continuous_weight: float
    threshold_lines: int
    line_size: int
    kind: str = DATA
    sample_count: int = 0
    sampling_interval: int = 1
    cold_fraction: float = 0.0
    refinement_rounds: int = 0
    fit_error: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"bad kind {self.kind!r}")
        if abs(self.discrete.total_weight + self.continuous_weight - 1.0) > 1e-9:
            raise ValueError("discrete and continuous weights must sum to 1")
        if self.continuous is None and self.continuous_weight > 1e-9:
            raise ValueError("continuous weight without a continuous model")

    def cdf(self, x):
        """Mixture P(X <= x)."""
        xa = np.asarray(x, dtype=float)
        out = np.zeros_like(xa)
        w = self.discrete.total_weight
        for v, p in zip(self.discrete.values, self.discrete.probs):
            out = out + w * p * (xa >= v)
        if self.continuous is not None:
            out = out + self.continuous_weight * np.asarray(dist.cdf(self.continuous, xa))
        return float(out) if np.ndim(x) == 0 else out

    def tail(self, capacity: float) -> float:
        """P(X >= capacity)."""
        w = self.discrete.total_weight
        p = 0.0
        for v, q in zip(self.discrete.values, self.discrete.probs):
            if v >= capacity:
                p += w * q
        if self.continuous is not None:
            p += self.continuous_weight * (1.0 - dist.cdf(self.continuous, float(capacity)))
        return min(max(p, 0.0), 1.0)

    def draw(self, n: int, rng) -> np.ndarray:
        """``n`` distances from the mixture; continuous draws clamped at 0."""
        out = np.empty(n, dtype=float)
        if self.continuous is None:
            atom = np.ones(n, dtype=bool)
        else:
            atom = rng.random(n) < self.discrete.total_weight
        k = int(atom.sum())
        if k:
            out[atom] = rng.choice(np.asarray(self.discrete.values, dtype=float), size=k,
                                   p=np.asarray(self.discrete.probs))
        if n - k:
            out[~atom] = np.maximum(dist.sample(self.continuous, rng, size=n - k), 0.0)
        return out

    def to_dict(self) -> dict:
        cont = None
        if self.continuous is not None:
            cont = {"family": self.continuous.family,
                    "params": dict(self.continuous.params),
                    "weight": self.continuous_weight}
        return {
            "version": JSON_VERSION,
            "kind": self.kind,
            "line_size": self.line_size,
            "threshold_lines": self.threshold_lines,
            "sample_count": self.sample_count,
            "sampling_interval": self.sampling_interval,
            "cold_fraction": self.cold_fraction,
            "discrete": {"weight": self.discrete.total_weight,
                         "atoms": [[v, p] for v, p in self.discrete.atoms]},
            "continuous": cont,
            "refinement_rounds": self.refinement_rounds,
            "fit_error": self.fit_error,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "Characterization":
        if d.get("version") != JSON_VERSION:
            raise ValueError(f"unsupported characterization version {d.get('version')!r}")
        atoms = d["discrete"]["atoms"]
        discrete = DiscreteComponent(tuple(_num(v) for v, _ in atoms),
                                     tuple(float(p) for _, p in atoms),
                                     float(d["discrete"]["weight"]))
        cont, cw = None, 0.0
        if d.get("continuous") is not None:
            cont = ContinuousModel(d["continuous"]["family"], d["continuous"]["params"])
            cw = float(d["continuous"]["weight"])
        return cls(discrete, cont, cw, int(d["threshold_lines"]), int(d["line_size"]),
                   d["kind"], int(d["sample_count"]), int(d["sampling_interval"]),
                   float(d["cold_fraction"]), int(d["refinement_rounds"]),
                   None if d.get("fit_error") is None else float(d["fit_error"]),
                   int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, text: str) -> "Characterization":
        return cls.from_dict(json.loads(text))


def characterize(s: SampleSet, cold_fraction: float = 0.0,
                 config: AnalysisConfig | None = None, return_diagnostics: bool = False):
    """Fit a :class:`Characterization` to ``s``.

    If the residual left after atom extraction cannot be fitted (fewer than
    two values, or degenerate moments) it is folded into the atoms and the
    result is purely discrete.
    """
    if len(s) == 0:
        raise ValueError("cannot characterize an empty sample set")
    if config is None:
        config = AnalysisConfig(min_cache_size=s.line_size, line_size=s.line_size)
    if config.line_size != s.line_size:
        raise ValueError(f"config line size {config.line_size} != samples line size {s.line_size}")

    discrete, residual = split_discrete(s, config.atom_threshold)
    model, diag, err = None, None, None
    if residual.size:
        try:
            model, diag = refined_fit(residual, config)
            err = diag.errors[-1]
        except DegenerateFitError:
            values, counts = np.unique(s.samples, return_counts=True)
            discrete = _atoms_of(values, counts, len(s))
    cw = 0.0 if model is None else 1.0 - discrete.total_weight

    c = Characterization(
        discrete=discrete, continuous=model, continuous_weight=cw,
        threshold_lines=config.threshold_lines, line_size=s.line_size,
        kind=s.source_kind, sample_count=len(s), sampling_interval=s.sampling_interval,
        cold_fraction=float(cold_fraction), refinement_rounds=config.refinement_rounds,
        fit_error=err, seed=config.seed)
    if return_diagnostics:
        return c, diag
    return c
