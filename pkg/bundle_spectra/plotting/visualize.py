"""
Visualization utilities for refinement studies.
"""

from pathlib import Path
from typing import Optional, Union

import matplotlib
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure


# Color schemes
COLORS = {
    'google': ['#4285F4', '#DB4437', '#F4B400', '#0F9D58', '#AB47BC'],
    'error': '#000080',
    'reference': '#DB4437',
    'weyl': ['#4285F4', '#0F9D58'],
}


def setup_matplotlib(font_size: int = 10):
    """Set up matplotlib with consistent styling."""
    plt.rcParams.update({'font.size': font_size})


def _style_axes(ax: plt.Axes, xlabel: str, ylabel: str, title: Optional[str]) -> None:
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=12)
    ax.tick_params(axis='both', direction='in')
    ax.tick_params(which='minor', direction='in')
    ax.xaxis.set_ticks_position('both')
    ax.yaxis.set_ticks_position('both')


def plot_convergence(
    result: dict,
    ax: Optional[plt.Axes] = None,
    title: Optional[str] = None,
    show_reference_slope: bool = True,
) -> plt.Axes:
    """Log-log plot of error against N for a refinement scenario.

    Parameters
    ----------
    result : dict
        Dictionary from ConvergenceSimulation.run() (not the weyl scenario).
    ax : plt.Axes, optional
        Matplotlib axes. If None, creates new figure.
    title : str, optional
        Axes title; defaults to the scenario name.
    show_reference_slope : bool
        Draw an N⁻² guide through the coarsest point.

    Returns
    -------
    ax : plt.Axes
    """
    if ax is None:
        fig, ax = plt.subplots(figsize=(6, 4))

    rows = [r for r in result['rows'] if r[3] > 0]
    N = np.array([r[0] for r in rows], dtype=float)
    error = np.array([r[3] for r in rows], dtype=float)

    ax.loglog(N, error, marker='o', color=COLORS['error'], linewidth=1.5, label='error')
    if show_reference_slope and N.size:
        ax.loglog(
            N, error[0] * (N[0] / N) ** 2,
            color=COLORS['reference'], linestyle='--', linewidth=1.0, label=r'$N^{-2}$',
        )
    _style_axes(ax, 'N', '|value - reference|', title or result['scenario'])
    ax.legend(fontsize=10, edgecolor='black')
    return ax


def plot_weyl_counts(
    result: dict,
    ax: Optional[plt.Axes] = None,
    title: Optional[str] = None,
) -> plt.Axes:
    """Invariant and total eigenvalue counts against Λ on log axes."""
    if ax is None:
        fig, ax = plt.subplots(figsize=(6, 4))

    lambdas = np.array([r[0] for r in result['rows']], dtype=float)
    invariant = np.array([r[1] for r in result['rows']], dtype=float)
    total = np.array([r[2] for r in result['rows']], dtype=float)
    summary = result['summary']

    colors = COLORS['weyl']
    ax.loglog(lambdas, invariant, marker='o', color=colors[0], linewidth=1.5,
              label=f"invariant (slope {summary['invariant_exponent']:.2f})")
    ax.loglog(lambdas, total, marker='s', color=colors[1], linewidth=1.5,
              label=f"total (slope {summary['total_exponent']:.2f})")
    _style_axes(ax, r'$\Lambda$', r'$N(\Lambda)$', title or 'weyl')
    ax.legend(fontsize=10, edgecolor='black')
    return ax


def save_convergence_svg(result: dict, path: Union[str, Path]) -> Path:
    """Render a convergence result as a single SVG file.

    The figure is built without pyplot so no display backend is needed;
    the SVG carries no date and a fixed hash salt.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    if result['scenario'] == 'weyl':
        plot_weyl_counts(result, ax=ax)
    else:
        plot_convergence(result, ax=ax)
    fig.tight_layout()
    with matplotlib.rc_context({'svg.hashsalt': 'bundle-spectra'}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    return path
