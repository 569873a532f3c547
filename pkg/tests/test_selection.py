"""Penalty-path tracing, retained-penalty rule, and ICL group-number choice."""

import math

import numpy as np
import pytest

from spaceclust import (
    BERNOULLI,
    GAUSSIAN,
    INFLATED_GAUSSIAN,
    POISSON,
    EmissionFamily,
    FitConfig,
    FitResult,
    InteractionNetwork,
    LambdaPath,
    ModelParams,
    Partition,
    PathConfig,
    StructuralNetwork,
    adjusted_rand,
    complete_loglik,
    icl,
    lambda_path,
    m_step,
    parameter_count,
    report_rows,
    run_vem,
    search_models,
    select_model,
    spectral_partition,
)
from spaceclust.selection import default_lam0


def two_chain_structure(block=8):
    n = 2 * block
    edges = [(i, i + 1, 1.0) for i in range(n - 1)]  # includes the single bridge
    return StructuralNetwork(edges, n=n)


@pytest.fixture(scope="module")
def benchmark():
    """16 nodes, two clean interaction blocks aligned with two chains."""
    rng = np.random.default_rng(1234)
    block = 8
    truth = np.repeat([0, 1], block)
    base = np.where(truth[:, None] == truth[None, :], 1.5, 0.5)
    vals = np.triu(base + rng.normal(scale=0.2, size=(16, 16)), 1)
    net = InteractionNetwork(vals + vals.T)
    return net, two_chain_structure(block), truth


class TestPathConfig:
    def test_explicit_grid_must_start_at_zero(self):
        with pytest.raises(ValueError, match="start at 0"):
            PathConfig(lam_grid=(0.5, 1.0))
        with pytest.raises(ValueError, match="at least 2"):
            PathConfig(lam_grid=(0.0,))
        with pytest.raises(ValueError, match="increasing"):
            PathConfig(lam_grid=(0.0, 2.0, 1.0))

    def test_scalar_knobs(self):
        with pytest.raises(ValueError, match="lam0"):
            PathConfig(lam0=0.0)
        with pytest.raises(ValueError, match="stability_window"):
            PathConfig(stability_window=1)
        with pytest.raises(ValueError, match="refine_ratio"):
            PathConfig(refine_ratio=1.0)
        with pytest.raises(ValueError, match="q_range"):
            PathConfig(q_range=(3, 2))


class TestParameterCount:
    def test_known_values(self):
        assert parameter_count(GAUSSIAN, 1) == 2
        assert parameter_count(GAUSSIAN, 2) == 4
        assert parameter_count(GAUSSIAN, 3) == 7
        assert parameter_count(BERNOULLI, 2) == 3
        assert parameter_count(POISSON, 3) == 6
        assert parameter_count(INFLATED_GAUSSIAN, 1) == 3
        assert parameter_count(INFLATED_GAUSSIAN, 2) == 7

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            parameter_count("beta", 2)


class TestIcl:
    def test_scalar_recomputation(self, benchmark):
        net, _, _ = benchmark
        fit = run_vem(net, None, 2, 0.0, GAUSSIAN, FitConfig(seed=1))
        ll = complete_loglik(fit.params, net, fit.partition.labels)
        n = net.n
        want = ll - 0.5 * 4 * math.log(n * (n - 1) / 2) - 0.5 * math.log(n)
        assert icl(fit, net) == pytest.approx(want)

    def test_one_group_has_no_proportion_term(self, benchmark):
        net, _, _ = benchmark
        fit = run_vem(net, None, 1, 0.0, GAUSSIAN)
        ll = complete_loglik(fit.params, net, fit.partition.labels)
        want = ll - 0.5 * 2 * math.log(net.n * (net.n - 1) / 2)
        assert icl(fit, net) == pytest.approx(want)

    def test_penalizes_an_unused_extra_group(self, benchmark):
        # pad the 2-group fit to 3 groups without touching the likelihood:
        # the ICL difference must be exactly the added parameter cost
        net, _, _ = benchmark
        fit2 = run_vem(net, None, 2, 0.0, GAUSSIAN, FitConfig(seed=1))
        mean2 = fit2.params.family.mean
        mean3 = np.zeros((3, 3))
        mean3[:2, :2] = mean2
        params3 = ModelParams(
            np.append(fit2.params.proportions, 0.0),
            EmissionFamily(GAUSSIAN, mean3, var=fit2.params.family.var),
        )
        fit3 = FitResult(
            tau=None,
            partition=Partition(fit2.partition.labels, n_groups=3),
            params=params3,
            lam=0.0,
            n_groups=3,
            objective_trace=[],
            converged=True,
        )
        assert complete_loglik(params3, net, fit3.partition.labels) == pytest.approx(
            complete_loglik(fit2.params, net, fit2.partition.labels)
        )
        n = net.n
        extra = 0.5 * 3 * math.log(n * (n - 1) / 2) + 0.5 * math.log(n)
        assert icl(fit2, net) - icl(fit3, net) == pytest.approx(extra)


class TestSpectralPartition:
    def test_splits_two_chains_at_the_bridge(self):
        g = two_chain_structure(8)
        labels = spectral_partition(g, 2)
        truth = np.repeat([0, 1], 8)
        assert adjusted_rand(labels, truth) == 1.0

    def test_single_group(self):
        g = two_chain_structure(4)
        assert np.array_equal(spectral_partition(g, 1), np.zeros(8, dtype=int))

    def test_too_many_groups(self):
        with pytest.raises(ValueError):
            spectral_partition(StructuralNetwork([(0, 1, 1.0)], n=2), 3)

    def test_deterministic(self):
        g = two_chain_structure(6)
        a = spectral_partition(g, 3, seed=4)
        b = spectral_partition(g, 3, seed=4)
        assert np.array_equal(a, b)


class TestDefaultLam0:
    def test_positive_and_finite(self, benchmark):
        net, structure, _ = benchmark
        fit = run_vem(net, None, 2, 0.0, GAUSSIAN, FitConfig(seed=1))
        lam0 = default_lam0(fit, net, structure)
        assert lam0 > 0 and math.isfinite(lam0)

    def test_edgeless_structure_falls_back_to_one(self, benchmark):
        net, _, _ = benchmark
        fit = run_vem(net, None, 2, 0.0, GAUSSIAN, FitConfig(seed=1))
        assert default_lam0(fit, net, StructuralNetwork([], n=16)) == 1.0


class TestLambdaPath:
    def test_requires_a_structure(self, benchmark):
        net, _, _ = benchmark
        with pytest.raises(ValueError, match="structural"):
            lambda_path(net, None, 2, GAUSSIAN)

    def test_stable_benchmark_keeps_the_block_partition(self, benchmark):
        net, structure, truth = benchmark
        path = lambda_path(net, structure, 2, GAUSSIAN, FitConfig(seed=2, n_restarts=2))
        assert len(path.fits) == len(path.grid)
        assert path.grid[0] == 0.0
        assert path.stabilized is True
        assert path.lam_max == path.grid[path.selected_index] > 0.0
        assert adjusted_rand(path.selected.partition.labels, truth) == 1.0
        # the unpenalized fit already finds the blocks, so the whole path
        # agrees and the retained value is the first positive one
        assert path.selected_index == 1

    def test_explicit_grid_is_used_verbatim(self, benchmark):
        net, structure, _ = benchmark
        cfg = PathConfig(lam_grid=(0.0, 0.5, 1.0), refine_rounds=0)
        path = lambda_path(net, structure, 2, GAUSSIAN, FitConfig(seed=2), cfg)
        assert path.grid == [0.0, 0.5, 1.0]
        assert [f.lam for f in path.fits] == [0.0, 0.5, 1.0]

    def test_unreachable_window_reports_no_stable_stretch(self, benchmark):
        net, structure, _ = benchmark
        cfg = PathConfig(lam_grid=(0.0, 0.5, 1.0), refine_rounds=0, stability_window=10)
        path = lambda_path(net, structure, 2, GAUSSIAN, FitConfig(seed=2), cfg)
        assert path.stabilized is False
        # fallback stays on the unpenalized partition
        assert np.array_equal(
            path.selected.partition.labels, path.fits[0].partition.labels
        )

    def test_single_group_path(self, benchmark):
        net, structure, _ = benchmark
        path = lambda_path(net, structure, 1, GAUSSIAN)
        for fit in path.fits:
            assert np.array_equal(fit.partition.labels, np.zeros(16, dtype=int))
        assert path.stabilized is True

    def test_path_fits_hold_uniform_proportions(self, benchmark):
        net, structure, _ = benchmark
        cfg = PathConfig(lam_grid=(0.0, 0.5), refine_rounds=0)
        path = lambda_path(net, structure, 2, GAUSSIAN, FitConfig(seed=2), cfg)
        for fit in path.fits:
            assert np.array_equal(fit.params.proportions, [0.5, 0.5])


class TestSearchModels:
    def test_fixed_lam_zero_without_structure(self, benchmark):
        net, _, truth = benchmark
        cfg = PathConfig(q_range=(1, 3))
        search = search_models(net, None, GAUSSIAN, FitConfig(seed=3, n_restarts=2), cfg, fixed_lam=0.0)
        assert search.paths is None
        assert sorted(search.fits) == [1, 2, 3]
        assert search.best.n_groups == 2
        assert adjusted_rand(search.best.partition.labels, truth) == 1.0
        assert all(f.icl is not None for f in search.fits.values())

    def test_path_mode_picks_two_groups(self, benchmark):
        net, structure, truth = benchmark
        cfg = PathConfig(q_range=(1, 3))
        best = select_model(net, structure, GAUSSIAN, FitConfig(seed=3, n_restarts=2), cfg)
        assert best.n_groups == 2
        assert adjusted_rand(best.partition.labels, truth) == 1.0

    def test_icl_filled_on_every_path_fit(self, benchmark):
        net, structure, _ = benchmark
        cfg = PathConfig(q_range=(1, 2), lam_grid=(0.0, 0.5, 1.0), refine_rounds=0)
        search = search_models(net, structure, GAUSSIAN, FitConfig(seed=3), cfg)
        for path in search.paths.values():
            assert all(f.icl is not None for f in path.fits)

    def test_icl_ties_go_to_the_smaller_size(self, benchmark, monkeypatch):
        net, _, _ = benchmark
        monkeypatch.setattr("spaceclust.selection.icl", lambda fit, network: 1.0)
        cfg = PathConfig(q_range=(1, 3))
        search = search_models(net, None, GAUSSIAN, FitConfig(seed=3), cfg, fixed_lam=0.0)
        assert search.best.n_groups == 1

    def test_group_range_must_fit_the_nodes(self, benchmark):
        net, _, _ = benchmark
        with pytest.raises(ValueError, match="q_range"):
            search_models(net, None, GAUSSIAN, FitConfig(), PathConfig(q_range=(1, 20)), fixed_lam=0.0)


class TestReportRows:
    EXPECTED_KEYS = {
        "n_groups",
        "lambda",
        "objective",
        "icl",
        "n_groups_nonempty",
        "penalty_of_hard_labels",
    }

    def test_one_row_per_path_fit(self, benchmark):
        net, structure, _ = benchmark
        cfg = PathConfig(q_range=(1, 2), lam_grid=(0.0, 0.5, 1.0), refine_rounds=0)
        search = search_models(net, structure, GAUSSIAN, FitConfig(seed=3), cfg)
        rows = report_rows(search, structure)
        assert len(rows) == 6
        for row in rows:
            assert set(row) == self.EXPECTED_KEYS
            assert row["penalty_of_hard_labels"] != ""

    def test_missing_structure_leaves_penalty_blank(self, benchmark):
        net, _, _ = benchmark
        cfg = PathConfig(q_range=(1, 2))
        search = search_models(net, None, GAUSSIAN, FitConfig(seed=3), cfg, fixed_lam=0.0)
        rows = report_rows(search, None)
        assert len(rows) == 2
        assert all(row["penalty_of_hard_labels"] == "" for row in rows)
