"""
Spectra of several weight operators with multiplicity bookkeeping.
"""

import logging
from typing import Optional, Sequence

from bundle_spectra.geometry.metric import InvariantMetric, WeightLike, as_weight
from bundle_spectra.solvers import LanczosSolver, collisions_from_spectra, weight_spectra

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ("alpha", "index", "lambda", "residual", "cluster_id", "multiplicity", "real_dimension")


class SpectrumSimulation:
    """Lowest eigenpairs of Δ_{g,α} for a list of weights.

    Parameters
    ----------
    metric : InvariantMetric
        The invariant metric.
    solver : LanczosSolver, optional
        Eigensolver; a default LanczosSolver when omitted.

    Examples
    --------
    >>> sim = SpectrumSimulation(get_preset("flat", 32))
    >>> result = sim.run(weights=[0, 1, 2], m=5)
    >>> result["spectra"][Weight((1,))][0].eigenvalue
    1.0
    """

    def __init__(self, metric: InvariantMetric, solver: Optional[LanczosSolver] = None):
        self.metric = metric
        self.solver = solver or LanczosSolver()

    def run(
        self,
        weights: Sequence[WeightLike] = (0, 1),
        m: int = 5,
        collision_tol: float = 1e-6,
    ) -> dict:
        """Solve every weight and collect table rows.

        Returns
        -------
        result : dict
            Dictionary containing:
            - 'weights': resolved Weight objects
            - 'spectra': dict Weight -> list of EigenPair
            - 'rows': table rows matching SPECTRUM_COLUMNS
            - 'collisions': cross-weight collisions among the weights
            - 'params': run parameters
        """
        d = self.metric.config.d
        resolved = [as_weight(w, d) for w in weights]
        if len({w.canonical() for w in resolved}) != len(resolved):
            raise ValueError(f"weights must be pairwise distinct up to sign, got {[str(w) for w in resolved]}")
        spectra = weight_spectra(self.metric, resolved, m, self.solver)
        rows = []
        for weight in resolved:
            for pair in spectra[weight]:
                rows.append((
                    str(weight), pair.index, pair.eigenvalue, pair.residual,
                    pair.cluster_id, pair.multiplicity, pair.real_dimension,
                ))
        collisions = collisions_from_spectra(spectra, collision_tol)
        logger.info("spectrum: %d weights, %d rows", len(resolved), len(rows))
        return {
            "weights": resolved,
            "spectra": spectra,
            "rows": rows,
            "collisions": collisions,
            "params": {"m": m, "collision_tol": collision_tol, **self.metric.config.to_dict()},
        }
