"""Total-space reconstruction and nodal topology of weight-α eigenfields."""

from bundle_spectra.nodal.total_space import (
    TotalSpaceField,
    minimal_theta_resolution,
    reconstruct_total_space,
    theta_grid,
    wrap_consistency_residual,
)
from bundle_spectra.nodal.topology import (
    DEFAULT_ZERO_TOL,
    DisjointSet,
    NodalReport,
    bilinear_minimum,
    count_nodal_domains,
    count_nodal_domains_bfs,
    count_nodal_domains_csgraph,
    domain_labels,
    dump_sign_array,
    euler_number,
    nodal_report,
    nodal_set_components,
    regular_value_margin,
    sign_array,
    vanish_on_orbit,
    vortex_charges,
)

__all__ = [
    "TotalSpaceField",
    "minimal_theta_resolution",
    "reconstruct_total_space",
    "theta_grid",
    "vanish_on_orbit",
    "wrap_consistency_residual",
    "DEFAULT_ZERO_TOL",
    "DisjointSet",
    "NodalReport",
    "count_nodal_domains",
    "count_nodal_domains_bfs",
    "count_nodal_domains_csgraph",
    "domain_labels",
    "dump_sign_array",
    "bilinear_minimum",
    "euler_number",
    "nodal_report",
    "nodal_set_components",
    "regular_value_margin",
    "sign_array",
    "vortex_charges",
]
