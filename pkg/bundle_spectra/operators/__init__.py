"""Discrete weight-α Laplacians and their analytic oracles."""

from bundle_spectra.operators.assembly import (
    QuadraticFormValue,
    Stencil,
    WeightOperator,
    apply,
    assemble_weight_operator,
    build_stencil,
    edge_phases,
    plaquette_fluxes,
    quadratic_form,
)
from bundle_spectra.operators.gauge import gauge_phase, gauge_transform
from bundle_spectra.operators.oracles import flat_spectrum, landau_ground_value
from bundle_spectra.operators.export import export_triplets, triplet_checksum
from bundle_spectra.operators.weyl import (
    WeylCounts,
    WeylCurve,
    fit_growth_exponent,
    weight_representatives,
    weyl_count_curve,
    weyl_counts,
)

__all__ = [
    "QuadraticFormValue",
    "Stencil",
    "WeightOperator",
    "apply",
    "assemble_weight_operator",
    "build_stencil",
    "edge_phases",
    "plaquette_fluxes",
    "quadratic_form",
    "gauge_phase",
    "gauge_transform",
    "flat_spectrum",
    "landau_ground_value",
    "export_triplets",
    "triplet_checksum",
    "WeylCounts",
    "WeylCurve",
    "fit_growth_exponent",
    "weight_representatives",
    "weyl_count_curve",
    "weyl_counts",
]
