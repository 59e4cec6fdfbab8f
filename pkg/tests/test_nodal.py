"""Tests for total-space reconstruction and nodal topology."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundle_spectra.errors import DiscretizationError, UnsupportedConfigurationError
from bundle_spectra.geometry import BundleConfig, get_preset, sample_random_metric
from bundle_spectra.nodal import (
    DisjointSet,
    TotalSpaceField,
    bilinear_minimum,
    count_nodal_domains,
    count_nodal_domains_bfs,
    count_nodal_domains_csgraph,
    domain_labels,
    dump_sign_array,
    euler_number,
    minimal_theta_resolution,
    nodal_report,
    nodal_set_components,
    reconstruct_total_space,
    regular_value_margin,
    sign_array,
    theta_grid,
    vanish_on_orbit,
    vortex_charges,
    wrap_consistency_residual,
)
from bundle_spectra.operators import assemble_weight_operator
from bundle_spectra.solvers import dense_eigenpairs


class TestDisjointSet:
    """Tests for the union-find structure."""

    def test_unions(self):
        ds = DisjointSet(6)
        assert ds.union(0, 1)
        assert ds.union(1, 2)
        assert not ds.union(0, 2)
        ds.union(4, 5)
        assert ds.components == 3
        roots = ds.roots()
        assert roots[0] == roots[2]
        assert roots[3] != roots[4] == roots[5]

    def test_union_pairs(self):
        ds = DisjointSet(5)
        ds.union_pairs(np.array([0, 2, 3]), np.array([1, 3, 4]))
        assert ds.find(2) == ds.find(4)
        assert ds.components == 2


class TestTotalSpace:
    """Tests for TotalSpaceField and reconstruction."""

    def test_minimal_theta_resolution(self):
        assert minimal_theta_resolution(8, 2) == 16
        assert minimal_theta_resolution(8, -1) == 8
        assert minimal_theta_resolution(8, 0) == 0

    def test_indivisible_theta_resolution(self):
        with pytest.raises(DiscretizationError) as info:
            reconstruct_total_space(np.ones((8, 8)), 1, 2, 20)
        assert info.value.minimal == 16

    def test_theta_resolution_too_small(self):
        with pytest.raises(DiscretizationError):
            reconstruct_total_space(np.ones((8, 8)), 1, 0, 1)

    def test_cosine_fiber(self):
        field = reconstruct_total_space(np.ones((6, 6)), 1, 0, 16)
        np.testing.assert_allclose(field.values[2, 3], np.cos(theta_grid(16)))
        np.testing.assert_allclose(field.companion[2, 3], -np.sin(theta_grid(16)))

    def test_torus_weight_rejected(self):
        with pytest.raises(UnsupportedConfigurationError):
            reconstruct_total_space(np.ones((6, 6)), (1, 1), 0, 8)

    def test_twisted_neighbour(self):
        field = TotalSpaceField(np.zeros((4, 4, 8)), euler=1)
        assert field.neighbor((3, 2, 1), 0, 1) == (0, 2, 5)
        assert field.neighbor((0, 2, 5), 0, -1) == (3, 2, 1)
        assert field.neighbor((1, 3, 7), 2, 1) == (1, 3, 0)

    @settings(max_examples=20, deadline=None)
    @given(
        st.integers(0, 3), st.integers(0, 3), st.integers(0, 7),
        st.sampled_from([0, 1, 2]), st.sampled_from([1, -1]), st.sampled_from([-2, -1, 0, 1, 2]),
    )
    def test_vectorized_neighbour_matches_scalar(self, p, q, r, axis, step, euler):
        field = TotalSpaceField(np.zeros((4, 4, 8)), euler=euler)
        flat = field.neighbor_index(axis, step)[p, q, r]
        assert np.unravel_index(flat, field.shape) == field.neighbor((p, q, r), axis, step)

    def test_swapped_companion(self):
        field = reconstruct_total_space(np.ones((4, 4)) * (1 + 1j), 1, 0, 8)
        swapped = field.swapped()
        np.testing.assert_array_equal(swapped.values, field.companion)
        np.testing.assert_array_equal(swapped.companion, -field.values)

    def test_gradient_uses_companion(self):
        field = reconstruct_total_space(np.ones((4, 4)), 2, 0, 8)
        np.testing.assert_allclose(field.gradient()[..., 2], 2 * field.companion)
        np.testing.assert_allclose(field.gradient()[..., :2], 0.0, atol=1e-12)

    def test_wrap_consistency(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=2, resolution=8), seed=3, amplitude=0.2)
        op = assemble_weight_operator(metric, 1)
        phi = dense_eigenpairs(op, 1)[0].vector
        field = reconstruct_total_space(phi, 1, 2, 32)
        assert wrap_consistency_residual(field, phi, op) < 1e-10


class TestNodalDomains:
    """Tests for nodal domain counting."""

    @pytest.mark.parametrize("alpha, domains", [(1, 2), (2, 4), (3, 6)])
    def test_fiber_harmonics(self, alpha, domains):
        field = reconstruct_total_space(np.ones((6, 6)), alpha, 0, 48)
        assert count_nodal_domains(field) == domains
        assert nodal_set_components(field) == domains

    def test_cosine_margin(self):
        field = reconstruct_total_space(np.ones((8, 8)), 1, 0, 32)
        assert regular_value_margin(field) == pytest.approx(np.sqrt(2.0), rel=1e-12)

    def test_sign_change_margin_interpolates(self):
        # no sample lands on a zero of cos θ when N_θ = 6; the edge midpoint
        # gradient is sin(π/3) and the RMS is 1/√2
        field = reconstruct_total_space(np.ones((4, 4)), 1, 0, 6)
        assert np.all(sign_array(field) != 0)
        assert count_nodal_domains(field) == 2
        assert regular_value_margin(field) == pytest.approx(np.sqrt(1.5), rel=1e-12)

    def test_no_nodal_set(self):
        field = TotalSpaceField(np.ones((4, 4, 4)))
        assert count_nodal_domains(field) == 1
        assert nodal_set_components(field) == 0
        assert regular_value_margin(field) == float("inf")

    def test_zero_field_is_all_neutral(self):
        field = TotalSpaceField(np.zeros((4, 4, 4)))
        assert count_nodal_domains(field) == 0
        assert np.all(domain_labels(field) == -1)

    def test_negated_field_same_counts(self):
        metric = sample_random_metric(BundleConfig(d=1, euler=1, resolution=8), seed=4, amplitude=0.2)
        phi = dense_eigenpairs(assemble_weight_operator(metric, 1), 2)[1].vector
        field = reconstruct_total_space(phi, 1, 1, 16)
        assert count_nodal_domains(field.negated()) == count_nodal_domains(field)
        assert nodal_set_components(field.negated()) == nodal_set_components(field)

    def test_invalid_zero_tol(self):
        with pytest.raises(ValueError):
            sign_array(TotalSpaceField(np.ones((4, 4, 4))), zero_tol=-1.0)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**16), st.sampled_from([0, 1, 2]))
    def test_union_find_matches_oracles(self, seed, euler):
        values = np.random.default_rng(seed).normal(size=(4, 4, 8))
        field = TotalSpaceField(values, euler=euler)
        count = count_nodal_domains(field)
        assert count == count_nodal_domains_bfs(field)
        assert count == count_nodal_domains_csgraph(field)
        assert domain_labels(field).max() + 1 == count

    def test_twist_joins_rows(self):
        # positive on one θ-half at x = 0 and the shifted half after the wrap
        N, n_theta = 4, 8
        values = -np.ones((N, N, n_theta))
        values[:, :, :4] = 1.0
        untwisted = TotalSpaceField(values, euler=0)
        assert count_nodal_domains(untwisted) == 2
        twisted = TotalSpaceField(values, euler=1)
        assert count_nodal_domains(twisted) == count_nodal_domains_bfs(twisted)


class TestVortices:
    """Tests for zero charges of base eigenfields."""

    @pytest.mark.parametrize("euler", [1, 2, -1])
    def test_charges_sum_to_euler_number(self, euler):
        metric = sample_random_metric(BundleConfig(d=1, euler=euler, resolution=8), seed=2, amplitude=0.2)
        op = assemble_weight_operator(metric, 1)
        phi = dense_eigenpairs(op, 1)[0].vector
        assert euler_number(op, phi) == euler
        assert vortex_charges(op, phi).shape == (8, 8)

    def test_trivial_bundle_no_net_charge(self):
        op = assemble_weight_operator(get_preset("flat", 8), 1)
        assert euler_number(op, np.ones((8, 8))) == 0
        assert np.all(vortex_charges(op, np.ones((8, 8))) == 0)


class TestOrbitVanishing:
    """Tests for the minimum of |φ| over the base."""

    def test_bilinear_vortex_at_centre(self):
        # f(s, t) = (2s − 1) + i(2t − 1)
        assert bilinear_minimum(-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j) == 0.0

    def test_bilinear_real_zero_line(self):
        assert bilinear_minimum(-1.0, 1.0, 1.0, -1.0) == 0.0

    def test_bilinear_without_zero(self):
        assert bilinear_minimum(1.0, 2.0, 3.0, 2.0) == pytest.approx(1.0)
        assert bilinear_minimum(1j, 1j, 2j, 2j) == pytest.approx(1.0)

    def test_node_minimum(self):
        assert vanish_on_orbit(np.ones((4, 4))) == 1.0
        phi = np.ones((4, 4))
        phi[1, 2] = 0.0
        assert vanish_on_orbit(phi) == 0.0
        assert vanish_on_orbit(np.zeros((4, 4))) == 0.0

    def test_trivial_bundle_constant_field(self):
        op = assemble_weight_operator(get_preset("flat", 8), 1)
        assert vanish_on_orbit(np.ones((8, 8)), op) == 1.0

    @pytest.mark.parametrize("euler", [1, 2, -1])
    def test_twisted_ground_state_vanishes(self, euler):
        metric = sample_random_metric(BundleConfig(d=1, euler=euler, resolution=12), seed=0, amplitude=0.2)
        op = assemble_weight_operator(metric, 1)
        phi = dense_eigenpairs(op, 1)[0].vector
        assert vanish_on_orbit(phi) > 0.0
        assert vanish_on_orbit(phi, op) == 0.0


class TestNodalReport:
    """Tests for NodalReport and the sign dump."""

    def test_report_for_constant_field(self):
        op = assemble_weight_operator(get_preset("flat", 8), 1)
        phi = np.ones((8, 8), dtype=complex)
        report = nodal_report(reconstruct_total_space(phi, 1, 0, 32), phi, op=op)
        assert report.domain_count == 2
        assert report.nodal_components == 2
        assert report.companion_domain_count == 2
        assert report.regular_margin == pytest.approx(np.sqrt(2.0))
        assert report.min_orbit_norm == 1.0
        assert report.euler_number == 0
        assert report.wrap_residual < 1e-12
        data = json.loads(report.to_json())
        assert data["n_theta"] == 32
        assert data["domain_count"] == 2

    def test_report_without_operator(self):
        phi = np.ones((4, 4))
        report = nodal_report(reconstruct_total_space(phi, 1, 0, 8), phi)
        assert report.wrap_residual is None
        assert report.euler_number is None

    def test_dump_sign_array(self, tmp_path):
        field = reconstruct_total_space(np.ones((4, 4)), 1, 0, 8)
        header = dump_sign_array(field, tmp_path / "signs.bin")
        raw = np.frombuffer((tmp_path / "signs.bin").read_bytes(), dtype=np.uint8)
        plane = header["plane_bytes"]
        positive = np.unpackbits(raw[:plane])[: field.size].reshape(field.shape)
        negative = np.unpackbits(raw[plane:])[: field.size].reshape(field.shape)
        signs = sign_array(field)
        np.testing.assert_array_equal(positive, signs > 0)
        np.testing.assert_array_equal(negative, signs < 0)
        stored = json.loads((tmp_path / "signs.bin.json").read_text(encoding="utf-8"))
        assert stored["shape"] == [4, 4, 8]
