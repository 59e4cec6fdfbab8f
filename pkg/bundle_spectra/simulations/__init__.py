"""Experiment drivers behind the command-line verbs."""

from bundle_spectra.simulations.scenarios import build_metric
from bundle_spectra.simulations.spectrum import SPECTRUM_COLUMNS, SpectrumSimulation
from bundle_spectra.simulations.perturbation import PerturbationSimulation
from bundle_spectra.simulations.nodal import NodalSimulation, default_theta_resolution
from bundle_spectra.simulations.ensemble import (
    ENSEMBLE_COLUMNS,
    EnsembleRow,
    EnsembleSimulation,
    EnsembleSummary,
    member_seeds,
)
from bundle_spectra.simulations.convergence import (
    DEFAULT_RESOLUTIONS,
    SCENARIOS,
    ConvergenceSimulation,
    is_decreasing,
    observed_orders,
)

__all__ = [
    "build_metric",
    "SPECTRUM_COLUMNS",
    "SpectrumSimulation",
    "PerturbationSimulation",
    "NodalSimulation",
    "default_theta_resolution",
    "ENSEMBLE_COLUMNS",
    "EnsembleRow",
    "EnsembleSimulation",
    "EnsembleSummary",
    "member_seeds",
    "DEFAULT_RESOLUTIONS",
    "SCENARIOS",
    "ConvergenceSimulation",
    "is_decreasing",
    "observed_orders",
]
