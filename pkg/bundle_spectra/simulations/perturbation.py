"""
Finite-difference verification of the variation formulas.
"""

import logging
from typing import Optional, Sequence

from bundle_spectra.geometry.metric import InvariantMetric, WeightLike, as_weight
from bundle_spectra.perturbation import DEFAULT_STEPS, variation_battery
from bundle_spectra.solvers import LanczosSolver

logger = logging.getLogger(__name__)


class PerturbationSimulation:
    """Run the variation battery and sort rows into passes and failures.

    Parameters
    ----------
    metric : InvariantMetric
        Base metric of every path.
    solver : LanczosSolver, optional
        Eigensolver used for the eigenvalue branches.

    Examples
    --------
    >>> sim = PerturbationSimulation(get_preset("flat", 16))
    >>> result = sim.run(alpha=1)
    >>> result["passed"]
    True
    """

    def __init__(self, metric: InvariantMetric, solver: Optional[LanczosSolver] = None):
        self.metric = metric
        self.solver = solver or LanczosSolver(tol=1e-11)

    def run(
        self,
        alpha: WeightLike = 1,
        index: int = 0,
        steps: Sequence[float] = DEFAULT_STEPS,
        rel_threshold: float = 1e-3,
        match_overlap: bool = False,
        zero_velocity: bool = False,
        seed: int = 0,
    ) -> dict:
        """Compare every analytic formula with its oracle.

        Returns
        -------
        result : dict
            Dictionary containing:
            - 'reports': list of VariationReport
            - 'failures': reports with rel_err above ``rel_threshold``
            - 'passed': True when there are no failures
            - 'params': run parameters

        Raises
        ------
        DegenerateBranchError
            If the branch is degenerate and ``match_overlap`` is false.
        """
        weight = as_weight(alpha, self.metric.config.d)
        reports = variation_battery(
            self.metric,
            weight,
            index=index,
            steps=steps,
            seed=seed,
            match_overlap=match_overlap,
            zero_velocity=zero_velocity,
            solver=self.solver,
        )
        failures = [r for r in reports if not r.passed(rel_threshold)]
        for report in failures:
            logger.warning(
                "%s: analytic %.12g vs numeric %.12g (rel_err %.3e)",
                report.formula_id, report.analytic, report.numeric, report.rel_err,
            )
        return {
            "reports": reports,
            "failures": failures,
            "passed": not failures,
            "params": {
                "alpha": str(weight),
                "index": index,
                "steps": list(steps),
                "rel_threshold": rel_threshold,
                "match_overlap": match_overlap,
                "zero_velocity": zero_velocity,
                "seed": seed,
            },
        }
