"""Tests for the eigensolver, clustering and cross-weight collisions."""

import numpy as np
import pytest

from bundle_spectra.errors import ConvergenceError
from bundle_spectra.geometry import BundleConfig, PerturbationPath, Weight, get_preset, sample_random_metric
from bundle_spectra.operators import assemble_weight_operator
from bundle_spectra.solvers import (
    EigenPair,
    LanczosSolver,
    assign_clusters,
    cluster_multiplicities,
    cross_weight_collisions,
    dense_eigenpairs,
    eigen_residual,
    lowest_eigenpairs,
    realified_residual,
    realify,
    write_eigenpairs_csv,
)


class TestLanczosSolver:
    """Tests for the LanczosSolver class."""

    @pytest.fixture
    def op(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=12), seed=3, amplitude=0.2)
        return assemble_weight_operator(metric, 1)

    def test_lanczos_matches_dense(self, op):
        lanczos = LanczosSolver(tol=1e-10, method="lanczos").solve(op, 4)
        dense = dense_eigenpairs(op, 4)
        np.testing.assert_allclose(
            [p.eigenvalue for p in lanczos], [p.eigenvalue for p in dense], atol=1e-8
        )

    def test_residuals_small(self, op):
        for pair in LanczosSolver(tol=1e-10, method="lanczos").solve(op, 3):
            assert pair.residual < 1e-8
            assert eigen_residual(op, pair.eigenvalue, pair.vector) == pytest.approx(pair.residual)

    def test_ascending_and_normalized(self, op):
        pairs = LanczosSolver().solve(op, 5)
        values = [p.eigenvalue for p in pairs]
        assert values == sorted(values)
        for pair in pairs:
            norm = np.sum(op.mass * np.abs(pair.vector.ravel()) ** 2)
            assert norm == pytest.approx(1.0)

    def test_deterministic_for_seed(self, op):
        first = LanczosSolver(method="lanczos", seed=4).solve(op, 3)
        second = LanczosSolver(method="lanczos", seed=4).solve(op, 3)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.vector, b.vector)

    def test_degenerate_cluster_resolved(self):
        op = assemble_weight_operator(get_preset("flat", 12), 1)
        pairs = LanczosSolver(tol=1e-10, method="lanczos").solve(op, 5)
        assert [p.multiplicity for p in pairs] == [1, 4, 4, 4, 4]
        assert len({p.cluster_id for p in pairs[1:]}) == 1

    def test_function_form(self, op):
        pairs = lowest_eigenpairs(op, 3, tol=1e-10, method="lanczos")
        dense = dense_eigenpairs(op, 3)
        np.testing.assert_allclose([p.eigenvalue for p in pairs], [p.eigenvalue for p in dense], atol=1e-8)

    def test_budget_exhausted(self, op):
        solver = LanczosSolver(tol=1e-14, max_iter=2, method="lanczos", max_restarts=1)
        with pytest.raises(ConvergenceError):
            solver.solve(op, 3)

    @pytest.mark.parametrize("m", [0, 144])
    def test_invalid_m(self, op, m):
        with pytest.raises(ValueError):
            LanczosSolver().solve(op, m)

    @pytest.mark.parametrize("kwargs", [{"tol": 0}, {"max_iter": 1}, {"method": "arpack"}])
    def test_invalid_options(self, kwargs):
        with pytest.raises(ValueError):
            LanczosSolver(**kwargs)


class TestClusters:
    """Tests for multiplicity bookkeeping."""

    def _pairs(self, values, weight=(1,)):
        return [
            EigenPair(v, np.zeros((3, 3)), 0.0, 0, Weight(weight), index=i)
            for i, v in enumerate(values)
        ]

    def test_assign_clusters(self):
        ids = assign_clusters([1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0], 1e-9)
        np.testing.assert_array_equal(ids, [0, 0, 1, 2, 2])

    def test_complex_weight_doubles_dimension(self):
        clusters = cluster_multiplicities(self._pairs([1.0, 1.0 + 1e-12, 2.0]), 1e-9)
        assert [(c.complex_multiplicity, c.real_dimension) for c in clusters] == [(2, 4), (1, 2)]

    def test_invariant_weight_real_dimension(self):
        clusters = cluster_multiplicities(self._pairs([0.0, 1.0, 1.0], weight=(0,)), 1e-9)
        assert [c.real_dimension for c in clusters] == [1, 2]

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            cluster_multiplicities(self._pairs([2.0, 1.0]))

    def test_flat_twisted_ground_cluster(self):
        # magnetic translations by N/e sites make the flat ground level e-fold
        pairs = dense_eigenpairs(assemble_weight_operator(get_preset("landau_e2", 8), 1), 4)
        clusters = cluster_multiplicities(pairs, 1e-8)
        assert clusters[0].complex_multiplicity == 2
        assert clusters[0].real_dimension == 4

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_sampled_metric_splits_ground_cluster(self, seed):
        metric = sample_random_metric(BundleConfig(d=1, euler=2, resolution=8), seed=seed, amplitude=0.2)
        pairs = dense_eigenpairs(assemble_weight_operator(metric, 1), 4)
        clusters = cluster_multiplicities(pairs, 1e-8)
        assert all(c.complex_multiplicity == 1 for c in clusters)
        assert pairs[1].eigenvalue - pairs[0].eigenvalue > 1e-6


class TestRealPairs:
    """Tests for the real (u, u*) reconstruction."""

    def test_realified_residual(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=5, amplitude=0.2)
        op = assemble_weight_operator(metric, 1)
        pair = dense_eigenpairs(op, 1)[0]
        assert realified_residual(op, pair) < 1e-9

    def test_partner_orthogonal(self):
        op = assemble_weight_operator(get_preset("landau_e1", 8), 1)
        pair = dense_eigenpairs(op, 1)[0]
        u, u_star = realify(pair)
        mass = np.concatenate([op.mass, op.mass])
        assert np.sum(mass * u.ravel() * u_star.ravel()) == pytest.approx(0.0, abs=1e-12)


class TestCollisions:
    """Tests for cross-weight eigenvalue collisions."""

    def test_constructed_collision(self):
        collisions = cross_weight_collisions(get_preset("flat_g3", 16), [1, 2], m=5)
        assert collisions
        for collision in collisions:
            assert (collision.alpha, collision.beta) == ((1,), (2,))
            assert collision.lambda_beta == pytest.approx(4.0 / 3.0, abs=1e-12)
            assert collision.lambda_alpha == pytest.approx(4.0 / 3.0, abs=1e-9)

    def test_rank_one_path_separates(self):
        # branches move at rates 5/3 and 32/3 along the rank-one path
        metric = get_preset("flat_g3", 16)
        t = 0.01
        perturbed = PerturbationPath.rank_one_vertical(metric, 0).evaluate(t)
        assert not cross_weight_collisions(perturbed, [1, 2], m=5)
        solver = LanczosSolver()
        lam_1 = solver.solve(assemble_weight_operator(perturbed, 1), 2)[1].eigenvalue
        lam_2 = solver.solve(assemble_weight_operator(perturbed, 2), 1)[0].eigenvalue
        assert abs(lam_2 - lam_1) == pytest.approx(t * 9, rel=0.2)

    def test_duplicate_weights_rejected(self):
        with pytest.raises(ValueError):
            cross_weight_collisions(get_preset("flat", 8), [1, -1], m=2)

    def test_no_weights(self):
        assert cross_weight_collisions(get_preset("flat", 8), [], m=2) == []


class TestEigenpairCsv:
    """Tests for eigenpair CSV output."""

    def test_columns_and_fields(self, tmp_path):
        op = assemble_weight_operator(get_preset("flat", 8), 0)
        pairs = dense_eigenpairs(op, 3)
        text = write_eigenpairs_csv(pairs, tmp_path / "pairs.csv", dump_fields=True)
        assert text.splitlines()[0] == "index,lambda,residual,cluster_id"
        assert len(text.splitlines()) == 4
        assert np.load(tmp_path / "pairs_fields.npy").shape == (3, 8, 8)
