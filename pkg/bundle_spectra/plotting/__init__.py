"""Plotting utilities for refinement studies."""

from bundle_spectra.plotting.visualize import (
    COLORS,
    plot_convergence,
    plot_weyl_counts,
    save_convergence_svg,
    setup_matplotlib,
)

__all__ = [
    "COLORS",
    "plot_convergence",
    "plot_weyl_counts",
    "save_convergence_svg",
    "setup_matplotlib",
]
