"""
Eigenvalue counting functions across torus weights.

The full Laplacian of an invariant metric splits into the weight-α operators,
so N_total(Λ) sums the weight counts: real multiplicity 1 per eigenvalue for
α = 0 and 2 for α ≠ 0, one representative per pair {α, −α}. Weights are
truncated at |α_j| <= alpha_max; every excluded weight β satisfies
V >= λ_min(G⁻¹)·(alpha_max+1)², which certifies completeness below that bound.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import scipy.linalg

from bundle_spectra.errors import DiscretizationError
from bundle_spectra.geometry.metric import InvariantMetric, Weight, min_eigenvalue_field
from bundle_spectra.operators.assembly import assemble_weight_operator

logger = logging.getLogger(__name__)

#: Fraction of 1/Δ² below which the grid spectrum is trusted.
DEFAULT_TRUST_FRACTION = 0.8


def weight_representatives(d: int, alpha_max: int) -> List[Weight]:
    """Zero plus one weight of each pair {α, −α} with max |α_j| <= alpha_max."""
    if alpha_max < 0:
        raise ValueError(f"alpha_max must be non-negative, got {alpha_max}")
    seen = set()
    weights = []
    for alpha in itertools.product(range(-alpha_max, alpha_max + 1), repeat=d):
        weight = Weight(alpha).canonical()
        if weight.alpha not in seen:
            seen.add(weight.alpha)
            weights.append(weight)
    return sorted(weights, key=lambda w: (sum(a * a for a in w.alpha), w.alpha))


def trust_threshold(metric: InvariantMetric, fraction: float = DEFAULT_TRUST_FRACTION) -> float:
    return fraction / metric.config.spacing**2


@dataclass(frozen=True)
class WeylCurve:
    """Counts N₀(Λ) and N_total(Λ) on a grid of Λ values."""

    lambdas: np.ndarray
    invariant: np.ndarray
    total: np.ndarray
    complete: np.ndarray
    per_weight: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class WeylCounts:
    lam: float
    invariant: int
    total: int
    complete: bool
    per_weight: Dict[str, int] = field(default_factory=dict)


def weyl_count_curve(
    metric: InvariantMetric,
    lambdas: Sequence[float],
    alpha_max: int,
    trust_fraction: float = DEFAULT_TRUST_FRACTION,
) -> WeylCurve:
    """Count eigenvalues <= Λ for every Λ in ``lambdas``.

    One partial dense eigendecomposition per weight is shared by all Λ.

    Raises
    ------
    DiscretizationError
        If max(lambdas) exceeds the trust threshold trust_fraction/Δ².
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ValueError("lambdas must be a non-empty 1-D sequence")
    lam_max = float(np.max(lambdas))
    threshold = trust_threshold(metric, trust_fraction)
    if lam_max > threshold:
        raise DiscretizationError(
            f"Λ = {lam_max:g} exceeds the trust threshold {threshold:.6g} "
            f"({trust_fraction:g}/Δ²) at N = {metric.resolution}",
            minimal=threshold,
        )

    invariant = np.zeros(lambdas.size, dtype=int)
    total = np.zeros(lambdas.size, dtype=int)
    per_weight = {}
    for weight in weight_representatives(metric.config.d, alpha_max):
        if float(np.min(metric.potential(weight))) > lam_max:
            continue
        op = assemble_weight_operator(metric, weight)
        values = scipy.linalg.eigh(
            op.symmetrized().toarray(),
            eigvals_only=True,
            subset_by_value=(-np.inf, lam_max),
        )
        counts = np.searchsorted(np.sort(values), lambdas, side="right")
        per_weight[str(weight)] = counts
        if weight.is_zero:
            invariant += counts
            total += counts
        else:
            total += 2 * counts
        logger.debug("weight %s: %d eigenvalues <= %g", weight, counts.max(), lam_max)

    bound = float(np.min(min_eigenvalue_field(metric.G_inverse()))) * (alpha_max + 1) ** 2
    complete = bound > lambdas
    if not np.all(complete):
        logger.warning(
            "weight cutoff alpha_max=%d is insufficient above Λ=%.6g; counts may be low",
            alpha_max, bound,
        )
    return WeylCurve(lambdas, invariant, total, complete, per_weight)


def weyl_counts(
    metric: InvariantMetric,
    lam: float,
    alpha_max: int,
    trust_fraction: float = DEFAULT_TRUST_FRACTION,
) -> WeylCounts:
    """N₀(Λ) and N_total(Λ) with the completeness flag of the weight cutoff.

    Examples
    --------
    >>> counts = weyl_counts(get_preset("flat", 32), 1.5, alpha_max=2)
    >>> counts.invariant, counts.total
    (5, 7)
    """
    curve = weyl_count_curve(metric, [lam], alpha_max, trust_fraction)
    return WeylCounts(
        lam=float(lam),
        invariant=int(curve.invariant[0]),
        total=int(curve.total[0]),
        complete=bool(curve.complete[0]),
        per_weight={k: int(v[0]) for k, v in curve.per_weight.items()},
    )


def fit_growth_exponent(lambdas: Sequence[float], counts: Sequence[float]) -> float:
    """Least-squares slope of log N(Λ) against log Λ over positive counts."""
    lambdas = np.asarray(lambdas, dtype=float)
    counts = np.asarray(counts, dtype=float)
    mask = (counts > 0) & (lambdas > 0)
    if np.count_nonzero(mask) < 2:
        raise ValueError("need at least two positive counts to fit a growth exponent")
    slope, _ = np.polyfit(np.log(lambdas[mask]), np.log(counts[mask]), 1)
    return float(slope)
