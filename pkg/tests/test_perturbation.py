"""Tests for first-variation formulas and their finite-difference oracles."""

import numpy as np
import pytest

from bundle_spectra.errors import DegenerateBranchError
from bundle_spectra.geometry import (
    BundleConfig,
    PerturbationPath,
    base_mode_symbol,
    flat_metric,
    get_preset,
    sample_random_metric,
)
from bundle_spectra.operators import assemble_weight_operator
from bundle_spectra.perturbation import (
    VariationReport,
    eigenvalue_branch_derivative,
    invariant_rescale_pairing,
    lambda_dot_general,
    lambda_dot_subspace,
    laplacian_variation_pairing,
    mixed_xy_pairing,
    pairing_finite_difference,
    random_fields,
    random_velocity,
    split_rescale_pairing,
    uhlenbeck_pairing_check,
    variation_battery,
)
from bundle_spectra.solvers import LanczosSolver, dense_eigenpairs


class TestVariationReport:
    """Tests for VariationReport."""

    def test_errors_computed(self):
        report = VariationReport("eigenvalue:x", 4.0, 4.002, 1e-3)
        assert report.abs_err == pytest.approx(0.002)
        assert report.rel_err == pytest.approx(0.0005)
        assert report.passed(1e-3)
        assert not report.passed(1e-4)

    def test_small_values_use_absolute_scale(self):
        report = VariationReport("pairing:x", 1e-9, 0.0, 1e-4)
        assert report.rel_err == pytest.approx(1e-9)

    def test_nan_fails(self):
        assert not VariationReport("pairing:x", 1.0, float("nan"), 1e-4).passed(1.0)


class TestEigenvalueVariation:
    """Eigenvalue branch derivatives against analytic values."""

    @pytest.fixture
    def flat(self):
        return get_preset("flat", 12)

    def test_rank_one_vertical_rate(self, flat):
        # λ₀ = α² = 4 for the constant field, λ̇ = n·α² − λ₀ = 8
        path = PerturbationPath.rank_one_vertical(flat, 0)
        numeric = eigenvalue_branch_derivative(path, 2, 0)
        assert numeric.value == pytest.approx(8.0, rel=1e-6)
        assert numeric.cluster_size == 1
        pair = dense_eigenpairs(assemble_weight_operator(flat, 2), 2)[0]
        assert lambda_dot_general(flat, 2, pair, path.velocity()) == pytest.approx(8.0, rel=1e-10)

    def test_mixed_vertical_rate(self):
        metric = get_preset("flat_t4", 8)
        path = PerturbationPath.mixed_vertical(metric, 0, 1)
        pair = dense_eigenpairs(assemble_weight_operator(metric, (1, 1)), 2)[0]
        assert lambda_dot_general(metric, (1, 1), pair, path.velocity()) == pytest.approx(2.0, rel=1e-10)
        assert eigenvalue_branch_derivative(path, (1, 1), 0).value == pytest.approx(2.0, rel=1e-6)

    def test_single_step_skips_extrapolation(self, flat):
        path = PerturbationPath.rank_one_vertical(flat, 0)
        numeric = eigenvalue_branch_derivative(path, 2, 0, steps=(1e-3,))
        assert len(numeric.estimates) == 1
        assert numeric.value == pytest.approx(8.0, rel=1e-4)

    def test_degenerate_branch_guarded(self, flat):
        path = PerturbationPath.rank_one_vertical(flat, 0)
        with pytest.raises(DegenerateBranchError):
            eigenvalue_branch_derivative(path, 1, 1)
        pair = dense_eigenpairs(assemble_weight_operator(flat, 1), 5)[1]
        with pytest.raises(DegenerateBranchError):
            lambda_dot_general(flat, 1, pair, path.velocity())

    def test_degenerate_branch_matched(self, flat):
        path = PerturbationPath.rank_one_vertical(flat, 0)
        numeric = eigenvalue_branch_derivative(path, 1, 1, match_overlap=True)
        expected = 2.0 - base_mode_symbol(12)
        assert numeric.cluster_size == 4
        np.testing.assert_allclose(numeric.cluster_derivatives, expected, rtol=1e-6)

        pairs = dense_eigenpairs(assemble_weight_operator(flat, 1), 5)[1:5]
        np.testing.assert_allclose(lambda_dot_subspace(flat, 1, pairs, path.velocity()), expected, rtol=1e-9)

    @pytest.mark.parametrize("steps", [(), (1e-3, 5e-4, 1e-4), (1e-3, 0.0)])
    def test_invalid_steps(self, flat, steps):
        path = PerturbationPath.rank_one_vertical(flat, 0)
        with pytest.raises(ValueError):
            eigenvalue_branch_derivative(path, 2, 0, steps=steps)

    def test_invalid_index(self, flat):
        path = PerturbationPath.rank_one_vertical(flat, 0)
        with pytest.raises(ValueError):
            eigenvalue_branch_derivative(path, 2, 500)

    def test_random_metric_general_velocity(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=2, amplitude=0.2)
        path = PerturbationPath.general(metric, random_velocity(metric, seed=5))
        solver = LanczosSolver(tol=1e-11)
        pair = solver.solve(assemble_weight_operator(metric, 1), 3)[0]
        analytic = lambda_dot_general(metric, 1, pair, path.velocity())
        numeric = eigenvalue_branch_derivative(path, 1, 0, solver=solver)
        assert numeric.value == pytest.approx(analytic, rel=1e-6, abs=1e-8)


class TestPairings:
    """First-variation pairings against central differences of the pencil."""

    @pytest.fixture
    def metric(self):
        return sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=8, amplitude=0.2)

    @pytest.fixture
    def fields(self, metric):
        return random_fields(metric, seed=1)

    def _field(self, metric, amplitude=0.3):
        x, y = metric.config.coordinates()
        return 1.0 + amplitude * np.cos(x) * np.sin(y)

    def test_general_velocity(self, metric, fields):
        u, v = fields
        path = PerturbationPath.general(metric, random_velocity(metric, seed=3))
        analytic = laplacian_variation_pairing(metric, 1, u, v, path.velocity())
        numeric = pairing_finite_difference(path, 1, u, v)
        assert analytic == pytest.approx(numeric, rel=1e-5)

    def test_split_terms_sum(self, metric, fields):
        u, v = fields
        g_dot = random_velocity(metric, seed=4)
        metric_term, volume_term = laplacian_variation_pairing(metric, 2, u, v, g_dot, split=True)
        assert metric_term + volume_term == pytest.approx(laplacian_variation_pairing(metric, 2, u, v, g_dot))

    def test_split_rescale_formula(self, metric, fields):
        u, v = fields
        a_dot, b_dot = 0.5 + 0.2 * self._field(metric), self._field(metric) - 1.0
        path = PerturbationPath.split_rescale(metric, a_dot, b_dot)
        analytic = split_rescale_pairing(metric, 1, u, v, a_dot, b_dot)
        assert analytic == pytest.approx(pairing_finite_difference(path, 1, u, v), rel=1e-5)

    def test_invariant_rescale_formula(self, metric, fields):
        u, v = fields
        f = self._field(metric)
        path = PerturbationPath.invariant_rescale(metric, f)
        analytic = invariant_rescale_pairing(metric, 1, u, v, f)
        assert analytic == pytest.approx(pairing_finite_difference(path, 1, u, v), rel=1e-5)

    def test_mixed_xy_formula(self, metric, fields):
        u, v = fields
        X = np.stack([self._field(metric), 0.4 * self._field(metric, -0.5)], axis=-1)
        path = PerturbationPath.mixed_xy(metric, X, 0)
        analytic = mixed_xy_pairing(metric, 1, u, v, X, 0)
        assert analytic == pytest.approx(pairing_finite_difference(path, 1, u, v), rel=1e-5)

    def test_mixed_xy_fiber_index(self, metric, fields):
        u, v = fields
        with pytest.raises(ValueError):
            mixed_xy_pairing(metric, 1, u, v, [1.0, 0.0], 1)

    def test_zero_velocity_vanishes(self, metric, fields):
        u, v = fields
        zeros = np.zeros((8, 8, 3, 3))
        assert laplacian_variation_pairing(metric, 1, u, v, zeros) == pytest.approx(0.0, abs=1e-14)
        assert pairing_finite_difference(PerturbationPath.general(metric, zeros), 1, u, v) == pytest.approx(0.0, abs=1e-6)

    def test_invalid_step(self, metric, fields):
        u, v = fields
        with pytest.raises(ValueError):
            pairing_finite_difference(PerturbationPath.split_rescale(metric, 0.0, 1.0), 1, u, v, step=0.0)


class TestUhlenbeckCheck:
    """Tests for the pairing identity along invariant rescalings."""

    def test_flat_ground_state(self):
        metric = flat_metric(BundleConfig(d=1, resolution=8))
        pair = dense_eigenpairs(assemble_weight_operator(metric, 1), 2)[0]
        x, y = metric.config.coordinates()
        fs = [1.0 + 0.3 * np.cos(x), 1.0 + 0.2 * np.sin(x + y)]
        check = uhlenbeck_pairing_check(metric, 1, pair.eigenvalue, pair.vector, pair.vector, fs)
        np.testing.assert_allclose(check.lhs, 0.0, atol=1e-8)
        assert check.c_fit == pytest.approx(1.0, rel=1e-6)
        assert check.c_derived == 1.0
        assert check.max_abs_mismatch_refit < 1e-6

    def test_rotated_partner_pairs_to_zero(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=3, amplitude=0.2)
        pair = dense_eigenpairs(assemble_weight_operator(metric, 1), 1)[0]
        x, y = metric.config.coordinates()
        fs = [1.0 + 0.3 * np.cos(x), 1.0 + 0.2 * np.sin(x + y)]
        check = uhlenbeck_pairing_check(metric, 1, pair.eigenvalue, pair.vector, 1j * pair.vector, fs)
        np.testing.assert_allclose(check.lhs, 0.0, atol=1e-6)
        np.testing.assert_allclose(check.rhs_stated, 0.0, atol=1e-12)
        assert np.isnan(check.c_fit)

    def test_fitted_constant_stable_on_sampled_metric(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=12), seed=6, amplitude=0.2)
        pair = dense_eigenpairs(assemble_weight_operator(metric, 1), 1)[0]
        x, y = metric.config.coordinates()
        fs = [1.0 + 0.3 * np.cos(x), 1.0 + 0.2 * np.sin(x + y), 1.0 + 0.25 * np.cos(2 * y)]
        check = uhlenbeck_pairing_check(metric, 1, pair.eigenvalue, pair.vector, pair.vector, fs)
        assert np.isfinite(check.c_fit)
        assert check.c_spread < 5e-2 * abs(check.c_fit)

    def test_zero_potential_gives_nan_fit(self):
        metric = flat_metric(BundleConfig(d=1, resolution=8))
        pair = dense_eigenpairs(assemble_weight_operator(metric, 0), 2)[1]
        check = uhlenbeck_pairing_check(metric, 0, pair.eigenvalue, pair.vector, pair.vector, [1.0])
        assert np.isnan(check.c_fit)

    def test_empty_batch(self):
        metric = flat_metric(BundleConfig(d=1, resolution=8))
        with pytest.raises(ValueError):
            uhlenbeck_pairing_check(metric, 1, 1.0, np.ones((8, 8)), np.ones((8, 8)), [])


class TestVariationBattery:
    """Tests for the full battery."""

    def test_circle_bundle_battery(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=7, amplitude=0.2)
        reports = variation_battery(metric, 1, seed=3)
        ids = {r.formula_id for r in reports}
        assert {"eigenvalue:rank_one_vertical_0", "formula:split_rescale", "formula:mixed_xy"} <= ids
        failing = [r.row() for r in reports if not r.passed(1e-3)]
        assert not failing

    def test_torus_fiber_battery(self):
        metric = sample_random_metric(BundleConfig(d=2, resolution=6), seed=1, amplitude=0.2)
        reports = variation_battery(metric, (1, 1))
        assert "eigenvalue:mixed_vertical_0_1" in {r.formula_id for r in reports}
        assert all(r.passed(1e-3) for r in reports)

    def test_zero_velocity_battery(self):
        metric = sample_random_metric(BundleConfig(d=1, resolution=6), seed=2, amplitude=0.2)
        reports = variation_battery(metric, 1, zero_velocity=True)
        assert reports
        for report in reports:
            assert report.analytic == pytest.approx(0.0, abs=1e-12)
            assert report.numeric == pytest.approx(0.0, abs=1e-7)

    def test_degenerate_battery_needs_matching(self):
        with pytest.raises(DegenerateBranchError):
            variation_battery(get_preset("flat", 8), 1, index=1)
