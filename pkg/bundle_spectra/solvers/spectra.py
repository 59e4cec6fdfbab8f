"""
Spectra across several torus weights.
"""

import itertools
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from bundle_spectra.geometry.metric import InvariantMetric, Weight, WeightLike, as_weight
from bundle_spectra.operators.assembly import assemble_weight_operator
from bundle_spectra.solvers.eigenpair import EigenPair
from bundle_spectra.solvers.lanczos import LanczosSolver

logger = logging.getLogger(__name__)


class Collision(NamedTuple):
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    lambda_alpha: float
    lambda_beta: float


def weight_spectra(
    metric: InvariantMetric,
    weights: Sequence[WeightLike],
    m: int,
    solver: Optional[LanczosSolver] = None,
) -> Dict[Weight, List[EigenPair]]:
    """Lowest ``m`` eigenpairs for each weight."""
    solver = solver or LanczosSolver()
    spectra = {}
    for value in weights:
        weight = as_weight(value, metric.config.d)
        spectra[weight] = solver.solve(assemble_weight_operator(metric, weight), m)
    return spectra


def cross_weight_collisions(
    metric: InvariantMetric,
    weights: Sequence[WeightLike],
    m: int,
    collision_tol: float = 1e-6,
    solver: Optional[LanczosSolver] = None,
) -> List[Collision]:
    """Eigenvalue coincidences between different weights.

    Parameters
    ----------
    metric : InvariantMetric
        Metric whose weight operators are compared.
    weights : sequence
        Weights, pairwise distinct up to sign.
    m : int
        Number of lowest eigenvalues compared per weight.
    collision_tol : float, optional
        Pairs with |λ_α − λ_β| <= collision_tol·max(1, λ_α) are reported.

    Returns
    -------
    list of Collision
        One entry per colliding pair of eigenvalues (with multiplicity).

    Examples
    --------
    >>> collisions = cross_weight_collisions(get_preset("flat_g3"), [1, 2], m=5)
    >>> collisions[0].lambda_beta
    1.3333333333333333
    """
    resolved = [as_weight(w, metric.config.d) for w in weights]
    canonical = [w.canonical() for w in resolved]
    if len(set(canonical)) != len(canonical):
        raise ValueError(f"weights must be pairwise distinct up to sign, got {[str(w) for w in resolved]}")
    if not resolved:
        return []

    return collisions_from_spectra(weight_spectra(metric, resolved, m, solver), collision_tol)


def collisions_from_spectra(
    spectra: Dict[Weight, List[EigenPair]], collision_tol: float = 1e-6
) -> List[Collision]:
    """Collisions among already computed spectra, in weight order."""
    collisions = []
    for alpha, beta in itertools.combinations(list(spectra), 2):
        for pa in spectra[alpha]:
            for pb in spectra[beta]:
                scale = max(1.0, abs(pa.eigenvalue))
                if abs(pa.eigenvalue - pb.eigenvalue) <= collision_tol * scale:
                    collisions.append(Collision(alpha.alpha, beta.alpha, pa.eigenvalue, pb.eigenvalue))
    logger.info("%d cross-weight collisions among %d weights", len(collisions), len(spectra))
    return collisions
