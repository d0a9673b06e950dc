import json

import numpy as np
import pytest

from stackfit import (
    AnalysisConfig,
    Characterization,
    ContinuousModel,
    DegenerateFitError,
    SampleSet,
    bias,
    cdf,
    characterize,
    compute_distances,
    fit_best,
    gen_cyclic,
    refined_fit,
    sample_distances,
    split_discrete,
    to_line_addresses,
)


def mixture(seed, n=10_000, atom=10.0, weight=0.5):
    rng = np.random.default_rng(seed)
    return np.where(rng.random(n) < weight, atom, rng.gamma(5, 2, n))


def test_split_single_value():
    comp, rest = split_discrete(SampleSet([1023] * 50), 0.01)
    assert comp.atoms == [(1023, 1.0)] and comp.total_weight == 1.0
    assert rest.size == 0


def test_split_arithmetic():
    comp, rest = split_discrete(SampleSet([5, 5, 5, 5, 9]), 0.5)
    assert comp.atoms == [(5, 1.0)]
    assert comp.total_weight == pytest.approx(0.8)
    assert rest.tolist() == [9]


def test_split_mixture():
    x = mixture(0)
    comp, rest = split_discrete(SampleSet(x), 0.05)
    assert comp.values == (10,)
    assert abs(comp.total_weight - 0.5) < 0.03
    model, _ = fit_best(rest, ["gamma"])
    assert model.params["shape"] == pytest.approx(5, rel=0.1)
    assert model.params["scale"] == pytest.approx(2, rel=0.1)


def test_fit_best_selects_gamma():
    hits = 0
    for seed in range(100):
        x = np.random.default_rng(seed).gamma(5, 2, 100_000)
        hits += fit_best(x)[0].family == "gamma"
    assert hits >= 95


def test_fit_best_selects_uniform():
    x = np.random.default_rng(1).uniform(200, 1000, 5000)
    assert fit_best(x)[0].family == "uniform"


def test_fit_best_uniform_from_zero_recovers_the_law():
    # GPD with shape -1 is Uniform[0, scale], so on Uniform[0, 1000] data the
    # two families compete on noise; either way the selected law must match
    grid = np.linspace(0, 1000, 201)
    picked = set()
    for seed in range(20):
        x = np.random.default_rng(seed).uniform(0, 1000, 5000)
        model, _ = fit_best(x)
        picked.add(model.family)
        assert np.max(np.abs(cdf(model, grid) - grid / 1000)) < 0.03
    assert picked <= {"uniform", "gpd"}


def test_fit_best_minimal_and_degenerate():
    model, err = fit_best([2.0, 8.0])
    assert model is not None and err >= 0
    with pytest.raises(DegenerateFitError):
        fit_best([4.0, 4.0, 4.0])
    with pytest.raises(DegenerateFitError):
        fit_best([1.0])


def test_fit_best_ignores_candidate_order():
    x = np.random.default_rng(2).uniform(0, 10, 500)
    a = fit_best(x, ["half_normal", "uniform"])
    b = fit_best(x, ["uniform", "half_normal"])
    assert a == b


UNI = ContinuousModel("uniform", {"a": 0, "b": 100})


def test_bias_noop_above_threshold():
    x = np.array([60.0, 70.0, 55.0])
    assert np.array_equal(bias(x, UNI, 50, np.random.default_rng(0)), x)


def test_bias_structure():
    out = bias([1, 2, 100], UNI, 50, np.random.default_rng(0))
    assert out[2] == 100 and out[0] < 50 and out[1] < 50


def test_bias_preserves_counts_and_upper_samples():
    rng = np.random.default_rng(5)
    x = rng.gamma(2, 30, 3000)
    out = bias(x, ContinuousModel("gamma", {"shape": 2, "scale": 30}), 40, rng)
    assert out.size == x.size
    assert np.sum(out < 40) == np.sum(x < 40)
    assert np.array_equal(out[x >= 40], x[x >= 40])


def test_bias_impossible_conditioning():
    with pytest.raises(ValueError):
        bias([1.0, 80.0], ContinuousModel("uniform", {"a": 60, "b": 100}), 50,
             np.random.default_rng(0))


def test_refined_fit_zero_rounds_is_fit_best():
    x = np.random.default_rng(3).gamma(5, 2, 2000)
    model, diag = refined_fit(x, AnalysisConfig(min_cache_size=8, line_size=1, refinement_rounds=0))
    assert model == fit_best(x)[0]
    assert len(diag) == 1
    assert diag.errors[0] == pytest.approx(diag.eps_up[0] + diag.eps_down[0])


def test_refined_fit_without_low_samples_is_stable():
    x = np.random.default_rng(3).gamma(5, 2, 2000) + 20
    model, diag = refined_fit(x, AnalysisConfig(min_cache_size=16, line_size=1))
    assert len(diag) == 4
    assert len(set(diag.errors)) == 1
    assert model == fit_best(x)[0]


def test_refined_fit_skips_impossible_rounds():
    # the uniform fit starts above 50, so nothing can be drawn below the threshold
    x = np.concatenate([np.full(10, 1.0), np.random.default_rng(0).uniform(60, 100, 500)])
    cfg = AnalysisConfig(min_cache_size=50, line_size=1, families="uniform")
    model, diag = refined_fit(x, cfg)
    assert model.params["a"] > 50
    assert diag.skipped == [False, True, True, True]
    assert len(set(diag.errors)) == 1


def test_refinement_improves_attached_tail():
    # a tail that continues the bulk: 90% Uniform[0,50) + 10% 50+Gamma(2,30)
    ups = []
    for seed in range(30):
        rng = np.random.default_rng(seed)
        n = 2048
        x = np.where(rng.random(n) < 0.9, rng.uniform(0, 50, n), 50 + rng.gamma(2, 30, n))
        _, diag = refined_fit(x, AnalysisConfig(min_cache_size=50, line_size=1, seed=seed))
        ups.append(diag.eps_up)
    med = np.median(ups, axis=0)
    assert np.all(np.diff(med) <= 0)
    assert med[3] <= 0.9 * med[0]


def detached_tail(seed, n=2048):
    # 90% Uniform[0,50) + 10% Gamma(5,2)+100: the tail sits apart from the bulk
    rng = np.random.default_rng(seed)
    k = n // 10
    return np.concatenate([rng.uniform(0, 50, n - k), rng.gamma(5, 2, k) + 100])


def test_refinement_on_detached_tail_per_seed():
    # Expected red (see README, "Known failures"). The first fit already puts the
    # wrong mass below 50, and resampling from it moves the refit further away.
    better = 0
    for seed in range(100):
        _, diag = refined_fit(detached_tail(seed),
                              AnalysisConfig(min_cache_size=50, line_size=1, seed=seed))
        better += diag.eps_up[3] < diag.eps_up[0]
    assert better >= 90, f"{better}/100 seeds improved"


def test_characterize_cyclic_is_discrete():
    d = compute_distances(to_line_addresses(gen_cyclic(1024, 50_000), 64))
    s = sample_distances(d, 1, 0, 64)
    c = characterize(s, 1024 / 50_000, AnalysisConfig(min_cache_size=4096, line_size=64))
    assert c.continuous is None and c.continuous_weight == 0
    assert c.discrete.atoms == [(1023, 1.0)]
    assert c.threshold_lines == 64


def test_characterize_gamma_is_continuous():
    x = np.random.default_rng(4).gamma(5, 2, 4000)
    c = characterize(SampleSet(x), 0.0, AnalysisConfig(min_cache_size=1, line_size=1))
    assert c.continuous_weight == 1.0 and len(c.discrete) == 0
    assert c.continuous.family == "gamma"


def test_characterize_mixture_weights():
    c = characterize(SampleSet(mixture(7)), 0.0, AnalysisConfig(min_cache_size=1, line_size=1))
    assert abs(c.discrete.total_weight - 0.5) < 0.05
    assert c.discrete.total_weight + c.continuous_weight == pytest.approx(1, abs=1e-9)


def test_characterize_degenerate_residual_goes_discrete():
    x = [3] * 60 + [7] * 40 + [9]
    c = characterize(SampleSet(x), 0.0, AnalysisConfig(min_cache_size=1, line_size=1,
                                                      atom_threshold=0.2))
    assert c.continuous is None
    assert c.discrete.values == (3, 7, 9)
    assert c.discrete.total_weight == 1.0


def test_characterize_deterministic_and_json_round_trip():
    x = mixture(9, n=3000)
    cfg = AnalysisConfig(min_cache_size=8, line_size=1, seed=5)
    a = characterize(SampleSet(x), 0.1, cfg)
    b = characterize(SampleSet(x), 0.1, cfg)
    assert a.to_json() == b.to_json()
    back = Characterization.from_json(a.to_json())
    assert back == a
    doc = json.loads(a.to_json())
    assert list(doc) == sorted(doc)
    assert set(doc) == {"version", "kind", "line_size", "threshold_lines", "sample_count",
                        "sampling_interval", "cold_fraction", "discrete", "continuous",
                        "refinement_rounds", "fit_error", "seed"}
    assert len(a.to_json().encode()) < 1024


def test_mixture_cdf_monotone_and_complete():
    c = characterize(SampleSet(mixture(1)), 0.0, AnalysisConfig(min_cache_size=1, line_size=1))
    xs = np.linspace(-1, 200, 2000)
    F = c.cdf(xs)
    assert np.all(np.diff(F) >= 0)
    assert F[0] == 0 and F[-1] == pytest.approx(1.0, abs=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(min_cache_size=32, line_size=64)
    with pytest.raises(ValueError):
        AnalysisConfig(min_cache_size=4096, line_size=48)
    with pytest.raises(ValueError):
        AnalysisConfig(min_cache_size=4096, atom_threshold=1.0)
    with pytest.raises(ValueError):
        AnalysisConfig(min_cache_size=4096, families=("lognormal",))
    assert AnalysisConfig(min_cache_size=4096, families="gamma").families == ("gamma",)
