"""
bundle_spectra: weight Laplacians on principal torus bundles over the 2-torus.

An invariant metric on a bundle of fiber dimension d and Euler number e
splits, weight by weight, into magnetic Laplacians on the base. This
package discretizes those operators, computes their low spectra, checks
first-variation formulas against finite differences and counts nodal
domains of eigenfields lifted to the total space.

Modules
-------
geometry : metric fields, frames, presets, sampling and perturbation paths
operators : gauge-invariant operator assembly and analytic references
solvers : Lanczos eigensolver, clustering and cross-weight collisions
perturbation : first-variation formulas and their finite-difference checks
nodal : total-space reconstruction, nodal domains and nodal sets
simulations : experiment drivers used by the command line
plotting : refinement and Weyl-count charts
"""

__version__ = "0.1.0"

from bundle_spectra.errors import (
    BundleSpectraError,
    ConfigError,
    ConvergenceError,
    DegenerateBranchError,
    DiscretizationError,
    MetricNotPositiveError,
    UnsupportedConfigurationError,
)
from bundle_spectra.geometry import (
    BundleConfig,
    InvariantMetric,
    PerturbationPath,
    Weight,
    flat_metric,
    get_preset,
    list_presets,
    sample_random_metric,
)
from bundle_spectra.operators import WeightOperator, assemble_weight_operator
from bundle_spectra.solvers import EigenPair, LanczosSolver, cross_weight_collisions
from bundle_spectra.perturbation import eigenvalue_branch_derivative, variation_battery
from bundle_spectra.nodal import NodalReport, nodal_report, reconstruct_total_space
from bundle_spectra.simulations import (
    ConvergenceSimulation,
    EnsembleSimulation,
    NodalSimulation,
    PerturbationSimulation,
    SpectrumSimulation,
    build_metric,
)

__all__ = [
    "BundleSpectraError",
    "ConfigError",
    "ConvergenceError",
    "DegenerateBranchError",
    "DiscretizationError",
    "MetricNotPositiveError",
    "UnsupportedConfigurationError",
    "BundleConfig",
    "InvariantMetric",
    "PerturbationPath",
    "Weight",
    "flat_metric",
    "get_preset",
    "list_presets",
    "sample_random_metric",
    "WeightOperator",
    "assemble_weight_operator",
    "EigenPair",
    "LanczosSolver",
    "cross_weight_collisions",
    "eigenvalue_branch_derivative",
    "variation_battery",
    "NodalReport",
    "nodal_report",
    "reconstruct_total_space",
    "ConvergenceSimulation",
    "EnsembleSimulation",
    "NodalSimulation",
    "PerturbationSimulation",
    "SpectrumSimulation",
    "build_metric",
]
