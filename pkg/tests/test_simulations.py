"""Tests for the experiment drivers and plotting."""

import math

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

from bundle_spectra.errors import DegenerateBranchError, UnsupportedConfigurationError
from bundle_spectra.geometry import BundleConfig, Weight, flat_metric, get_preset, sample_random_metric
from bundle_spectra.plotting import plot_convergence, plot_weyl_counts, save_convergence_svg
from bundle_spectra.simulations import (
    SPECTRUM_COLUMNS,
    ConvergenceSimulation,
    EnsembleSimulation,
    NodalSimulation,
    PerturbationSimulation,
    SpectrumSimulation,
    build_metric,
    default_theta_resolution,
    is_decreasing,
    member_seeds,
    observed_orders,
)


class TestBuildMetric:
    """Tests for build_metric."""

    def test_zero_amplitude_returns_base(self):
        metric = build_metric(euler=1, resolution=8)
        assert metric.config.euler == 1
        assert np.all(metric.A == 0)

    def test_preset_fixes_configuration(self):
        metric = build_metric(d=2, euler=0, resolution=8, preset="landau_e1")
        assert (metric.config.d, metric.config.euler) == (1, 1)

    def test_random_perturbation(self):
        a = build_metric(euler=1, resolution=8, seed=2, amplitude=0.2)
        b = build_metric(euler=1, resolution=8, seed=2, amplitude=0.2)
        np.testing.assert_array_equal(a.h, b.h)
        assert not np.allclose(a.h, np.eye(2))


class TestSpectrumSimulation:
    """Tests for SpectrumSimulation."""

    def test_rows_and_columns(self):
        result = SpectrumSimulation(get_preset("flat", 16)).run(weights=[0, 1, 2], m=3)
        assert len(result["rows"]) == 9
        assert all(len(row) == len(SPECTRUM_COLUMNS) for row in result["rows"])
        ground = result["spectra"][Weight((1,))][0]
        assert ground.eigenvalue == pytest.approx(1.0, abs=1e-10)
        assert result["params"]["resolution"] == 16

    def test_real_dimension_column(self):
        result = SpectrumSimulation(get_preset("flat", 16)).run(weights=[0, 1], m=1)
        by_weight = {row[0]: row[-1] for row in result["rows"]}
        assert by_weight == {"0": 1, "1": 2}

    def test_constructed_collisions_reported(self):
        result = SpectrumSimulation(get_preset("flat_g3", 16)).run(weights=[1, 2], m=5)
        assert len(result["collisions"]) == 4

    def test_duplicate_weights_rejected(self):
        with pytest.raises(ValueError):
            SpectrumSimulation(get_preset("flat", 8)).run(weights=[1, -1])


class TestPerturbationSimulation:
    """Tests for PerturbationSimulation."""

    def test_random_metric_passes(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=7, amplitude=0.2)
        result = PerturbationSimulation(metric).run(alpha=1, seed=3)
        assert result["passed"]
        assert result["failures"] == []
        assert result["params"]["alpha"] == "1"

    def test_tight_threshold_collects_failures(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=7, amplitude=0.2)
        result = PerturbationSimulation(metric).run(alpha=1, seed=3, rel_threshold=0.0)
        assert not result["passed"]
        assert result["failures"]

    def test_degenerate_branch(self):
        with pytest.raises(DegenerateBranchError):
            PerturbationSimulation(get_preset("flat", 8)).run(alpha=1, index=1)


class TestNodalSimulation:
    """Tests for NodalSimulation."""

    def test_needs_circle_bundle(self):
        with pytest.raises(UnsupportedConfigurationError):
            NodalSimulation(flat_metric(BundleConfig(d=2, resolution=6)))

    def test_default_theta_resolution(self):
        assert default_theta_resolution(8, 0) == 16
        assert default_theta_resolution(8, -3) == 48

    def test_synthetic_field(self):
        result = NodalSimulation(get_preset("flat", 8)).run(alpha=1, synthetic=True)
        assert result["eigenvalue"] is None
        assert result["field"].shape == (8, 8, 16)
        assert result["report"].domain_count == 2
        assert result["report"].nodal_components == 2

    def test_eigenfield_report(self, tmp_path):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=1, amplitude=0.2)
        result = NodalSimulation(metric).run(alpha=1, sign_dump=str(tmp_path / "signs.bin"))
        report = result["report"]
        assert report.euler_number == 1
        assert report.wrap_residual < 1e-10
        assert report.domain_count >= 1
        assert report.min_orbit_norm == 0.0
        assert (tmp_path / "signs.bin").exists()
        assert (tmp_path / "signs.bin.json").exists()

    @pytest.mark.slow
    @pytest.mark.parametrize("euler", [1, 2])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_ground_state_two_domains_connected_nodal_set(self, euler, seed):
        metric = sample_random_metric(BundleConfig(d=1, euler=euler, resolution=16), seed=seed, amplitude=0.2)
        report = NodalSimulation(metric).run(alpha=1)["report"]
        assert report.domain_count == 2
        assert report.nodal_components == 1
        assert report.companion_domain_count == 2
        assert report.companion_components == 1
        assert report.euler_number == euler

    @pytest.mark.slow
    @pytest.mark.parametrize("euler", [1, 2])
    def test_margin_stable_under_theta_refinement(self, euler):
        metric = sample_random_metric(BundleConfig(d=1, euler=euler, resolution=12), seed=4, amplitude=0.2)
        sim = NodalSimulation(metric)
        coarse = sim.run(alpha=1, n_theta=24 * euler)["report"].regular_margin
        fine = sim.run(alpha=1, n_theta=48 * euler)["report"].regular_margin
        assert 0.0 < coarse < np.inf
        assert 0.5 <= fine / coarse <= 2.0


class TestEnsembleSimulation:
    """Tests for EnsembleSimulation."""

    def test_member_seeds_deterministic(self):
        seeds = member_seeds(5, 3)
        assert seeds == member_seeds(5, 3)
        assert len(set(seeds)) == 3
        assert member_seeds(5, 0) == []

    def test_negative_size(self):
        with pytest.raises(ValueError):
            member_seeds(0, -1)

    def test_constructed_collisions_every_member(self):
        sim = EnsembleSimulation(preset="flat_g3", resolution=16, amplitude=0.0)
        summary = sim.run(size=2, weights=(1, 2), m=5, nodal=False)["summary"]
        assert summary.collision_fraction == 1.0
        assert summary.simple_fraction == 0.0
        assert all(row.max_cluster == 4 for row in summary.rows)
        assert summary.median_domain_count is None

    def test_empty_ensemble(self):
        result = EnsembleSimulation(resolution=8).run(size=0)
        summary = result["summary"]
        assert summary.rows == []
        assert math.isnan(summary.collision_fraction)
        assert math.isnan(summary.simple_fraction)
        assert summary.aggregates()["size"] == 0

    def test_nodal_columns(self):
        sim = EnsembleSimulation(euler=1, resolution=8, amplitude=0.2)
        summary = sim.run(size=2, seed=1, weights=(1, 2), m=3)["summary"]
        assert all(row.domain_count is not None for row in summary.rows)
        assert summary.median_regular_margin is not None

    @pytest.mark.slow
    def test_sampled_metrics_are_generic(self):
        sim = EnsembleSimulation(euler=1, resolution=12, amplitude=0.2)
        summary = sim.run(size=6, seed=11, weights=(0, 1, 2, 3), m=8, nodal=False)["summary"]
        assert summary.collision_fraction == 0.0
        assert summary.simple_fraction == 1.0
        assert all(row.max_cluster == 1 for row in summary.rows)

    @pytest.mark.slow
    def test_workers_do_not_change_rows(self):
        sim = EnsembleSimulation(euler=1, resolution=8, amplitude=0.2)
        serial = sim.run(size=3, seed=4, weights=(1, 2), m=3, workers=1)
        parallel = sim.run(size=3, seed=4, weights=(1, 2), m=3, workers=2)
        assert serial["summary"].rows == parallel["summary"].rows
        assert serial["seeds"] == parallel["seeds"]


class TestConvergenceSimulation:
    """Tests for ConvergenceSimulation."""

    def test_observed_orders(self):
        orders = observed_orders([16, 32, 64], [4e-2, 1e-2, 0.0])
        assert math.isnan(orders[0])
        assert orders[1] == pytest.approx(2.0)
        assert math.isnan(orders[2])

    def test_flat_eigenvalue_second_order(self):
        result = ConvergenceSimulation("flat_eigenvalue").run(resolutions=[16, 32], index=1)
        N, value, reference, error, order = result["rows"][-1]
        assert reference == pytest.approx(2.0)
        assert error < 5e-3
        assert order == pytest.approx(2.0, abs=0.1)
        assert result["summary"]["monotone_decreasing"]

    def test_landau_reference(self):
        result = ConvergenceSimulation("landau").run(resolutions=[24, 32])
        reference = result["rows"][-1][2]
        assert reference == pytest.approx(1.0 + 1.0 / (2 * np.pi))
        assert result["rows"][-1][3] < 1.2e-2

    def test_orbit_vanishing(self):
        result = ConvergenceSimulation("orbit_vanishing", euler=1, seed=2).run(resolutions=[8, 12])
        assert all(row[2] == 0.0 for row in result["rows"])
        assert all(row[1] == 0.0 for row in result["rows"])
        assert result["summary"]["monotone_decreasing"]

    @pytest.mark.slow
    @pytest.mark.parametrize("euler, seed", [(1, 0), (2, 0), (1, 2)])
    def test_orbit_vanishing_refinement(self, euler, seed):
        result = ConvergenceSimulation("orbit_vanishing", euler=euler, seed=seed).run(resolutions=[16, 24, 32, 48])
        values = [row[1] for row in result["rows"]]
        assert values == [0.0, 0.0, 0.0, 0.0]
        assert result["summary"]["monotone_decreasing"]

    def test_is_decreasing(self):
        assert is_decreasing([4e-2, 1e-2, 2e-3])
        assert is_decreasing([0.0, 0.0])
        assert not is_decreasing([1e-2, 1e-2])
        assert not is_decreasing([1e-2, 2e-2, 0.0])

    def test_weyl_counts(self):
        result = ConvergenceSimulation("weyl").run(resolutions=[32], lambdas=[1.5, 2.5, 3.5, 4.5], alpha_max=2)
        assert result["rows"][0][1:3] == (5, 7)
        assert result["summary"]["resolution"] == 32
        assert result["summary"]["total_exponent"] > 0

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            ConvergenceSimulation("heat_trace")

    def test_empty_resolutions(self):
        with pytest.raises(ValueError):
            ConvergenceSimulation().run(resolutions=[])


class TestPlotting:
    """Tests for the convergence figures."""

    @pytest.fixture
    def result(self):
        return ConvergenceSimulation("flat_eigenvalue").run(resolutions=[8, 12], index=1)

    def test_plot_convergence(self, result):
        ax = plot_convergence(result)
        assert ax.get_xscale() == "log"
        assert ax.get_title() == "flat_eigenvalue"

    def test_plot_weyl(self):
        result = ConvergenceSimulation("weyl").run(resolutions=[16], lambdas=[1.5, 3.0], alpha_max=1)
        ax = plot_weyl_counts(result)
        assert len(ax.get_lines()) == 2

    def test_save_svg(self, result, tmp_path):
        path = save_convergence_svg(result, tmp_path / "figs" / "convergence.svg")
        text = path.read_text(encoding="utf-8")
        assert text.lstrip().startswith("<?xml")
        assert "<svg" in text
