"""Cache-behaviour characterization from sampled stack distances.

Typical flow::

    seq = read_trace("app.bin")
    d = compute_distances(to_line_addresses(seq, 64), kind=seq.kind)
    s = sample_distances(d, interval=50_000, line_size=64)
    c = characterize(s, cold_fraction=cold_stats(d)[0] / len(d),
                     config=AnalysisConfig(min_cache_size=4096, line_size=64))
    miss_ratio(c, CacheConfig(32 * 1024, 64)).capacity_miss_ratio
"""

from .cachesim import SimResult, empirical_miss_ratio, simulate_lines, simulate_lru
from .characterize import (
    AUTO,
    AnalysisConfig,
    Characterization,
    DiscreteComponent,
    RefinementDiagnostics,
    bias,
    characterize,
    fit_best,
    refined_fit,
    split_discrete,
)
from .distributions import (
    FAMILIES,
    GAMMA,
    GPD,
    HALF_NORMAL,
    UNIFORM,
    ContinuousModel,
    Moments,
    cdf,
    fit_error,
    moments,
    mom_fit,
    quantile,
    sample,
    sample_below,
)
from .errors import DegenerateFitError, LineSizeMismatch, StackfitError, TraceFormatError
from .predict import (
    CacheConfig,
    PredictionResult,
    divergence,
    miss_ratio,
    monte_carlo_outline,
    sweep,
)
from .stackdist import (
    COLD,
    DistanceSequence,
    SampleSet,
    cold_stats,
    compute_distances,
    compute_distances_bruteforce,
    outline,
    read_samples_csv,
    sample_distances,
    to_line_addresses,
    write_samples_csv,
)
from .trace import (
    DATA,
    INSTRUCTION,
    AccessSequence,
    gen_cyclic,
    gen_from_distance_model,
    gen_random_uniform,
    read_trace,
    write_trace,
)

__version__ = "0.1.0"
