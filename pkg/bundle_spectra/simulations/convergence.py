"""
Grid-refinement studies against analytic references.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from bundle_spectra.geometry.metric import as_weight
from bundle_spectra.nodal import vanish_on_orbit
from bundle_spectra.operators import (
    assemble_weight_operator,
    fit_growth_exponent,
    flat_spectrum,
    landau_ground_value,
    weyl_count_curve,
)
from bundle_spectra.simulations.scenarios import build_metric
from bundle_spectra.solvers import LanczosSolver

logger = logging.getLogger(__name__)

SCENARIOS = ("flat_eigenvalue", "orbit_vanishing", "landau", "weyl")
DEFAULT_RESOLUTIONS = (16, 24, 32, 48, 64)
REFINEMENT_COLUMNS = ("N", "value", "reference", "error", "order")
WEYL_COLUMNS = ("lambda", "invariant_count", "total_count", "complete")


def is_decreasing(errors: Sequence[float]) -> bool:
    """True if errors never grow and either shrink overall or are all exactly 0."""
    errors = np.asarray(errors, dtype=float)
    if not np.all(np.diff(errors) <= 0):
        return False
    return bool(errors[-1] < errors[0] or errors[-1] == 0.0)


def observed_orders(resolutions: Sequence[int], errors: Sequence[float]) -> List[float]:
    """log(e_{k−1}/e_k) / log(N_k/N_{k−1}); NaN for the first entry or zero errors."""
    orders = [float("nan")]
    for k in range(1, len(errors)):
        previous, current = errors[k - 1], errors[k]
        if previous > 0 and current > 0:
            orders.append(float(np.log(previous / current) / np.log(resolutions[k] / resolutions[k - 1])))
        else:
            orders.append(float("nan"))
    return orders


class ConvergenceSimulation:
    """Run one refinement scenario.

    Scenarios
    ---------
    flat_eigenvalue
        Eigenvalue ``index`` of a constant metric against the continuum
        flat spectrum.
    landau
        Ground value of the flat e ≠ 0 bundle against the Landau formula.
    orbit_vanishing
        min|φ|/RMS|φ| of the ground state over nodes and charged
        plaquettes; 0 once the zeros forced by α·e ≠ 0 are resolved.
    weyl
        Invariant and total eigenvalue counts at the finest resolution,
        with fitted growth exponents.

    Examples
    --------
    >>> result = ConvergenceSimulation("flat_eigenvalue").run(resolutions=[16, 32], index=1)
    >>> result["rows"][-1][2]
    2.0
    """

    def __init__(
        self,
        scenario: str = "flat_eigenvalue",
        preset: Optional[str] = None,
        euler: int = 1,
        seed: int = 0,
        modes: int = 2,
        amplitude: float = 0.2,
        solver: Optional[LanczosSolver] = None,
    ):
        if scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
        self.scenario = scenario
        self.preset = preset
        self.euler = euler
        self.seed = seed
        self.modes = modes
        self.amplitude = amplitude
        self.solver = solver or LanczosSolver()

    def run(
        self,
        resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
        alpha: int = 1,
        index: int = 1,
        lambdas: Optional[Sequence[float]] = None,
        alpha_max: int = 8,
    ) -> dict:
        """Evaluate the scenario over ``resolutions``.

        Returns
        -------
        result : dict
            Dictionary containing:
            - 'scenario': scenario name
            - 'header': column names of 'rows'
            - 'rows': one row per resolution (per Λ for weyl)
            - 'summary': scenario-level numbers (final order, slopes)
        """
        resolutions = sorted(int(n) for n in resolutions)
        if not resolutions:
            raise ValueError("resolutions must not be empty")
        if self.scenario == "weyl":
            return self._run_weyl(resolutions[-1], lambdas, alpha_max)

        values, references = [], []
        for N in resolutions:
            value, reference = self._evaluate(N, alpha, index)
            values.append(value)
            references.append(reference)
            logger.info("%s N=%d: %.12g (reference %.12g)", self.scenario, N, value, reference)
        errors = [abs(v - r) for v, r in zip(values, references)]
        orders = observed_orders(resolutions, errors)
        rows = list(zip(resolutions, values, references, errors, orders))
        return {
            "scenario": self.scenario,
            "header": REFINEMENT_COLUMNS,
            "rows": rows,
            "summary": {
                "final_order": orders[-1],
                "monotone_decreasing": is_decreasing(errors),
            },
        }

    def _evaluate(self, N: int, alpha: int, index: int):
        if self.scenario == "flat_eigenvalue":
            metric = build_metric(resolution=N, preset=self.preset or "flat")
            weight = as_weight(alpha, metric.config.d)
            if metric.config.euler != 0:
                raise ValueError("flat_eigenvalue needs a trivial bundle preset")
            exact = flat_spectrum(
                metric.config, weight, G=metric.G[0, 0], h=metric.h[0, 0],
                count=index + 1, discrete=False,
            )[index]
            pairs = self.solver.solve(assemble_weight_operator(metric, weight), index + 1)
            return pairs[index].eigenvalue, float(exact)

        if self.scenario == "landau":
            euler = self.euler or 1
            metric = build_metric(euler=euler, resolution=N)
            pair = self.solver.solve(assemble_weight_operator(metric, alpha), 1)[0]
            return pair.eigenvalue, landau_ground_value(alpha, euler)

        metric = build_metric(
            euler=self.euler, resolution=N, preset=self.preset,
            seed=self.seed, modes=self.modes, amplitude=self.amplitude,
        )
        op = assemble_weight_operator(metric, alpha)
        pair = self.solver.solve(op, 1)[0]
        return vanish_on_orbit(pair.vector, op), 0.0

    def _run_weyl(self, N: int, lambdas: Optional[Sequence[float]], alpha_max: int) -> dict:
        lambdas = np.asarray(lambdas if lambdas is not None else np.linspace(20.0, 80.0, 13), dtype=float)
        metric = build_metric(
            resolution=N, preset=self.preset or "flat",
            seed=self.seed, modes=self.modes, amplitude=0.0,
        )
        curve = weyl_count_curve(metric, lambdas, alpha_max)
        rows = [
            (float(lam), int(n0), int(nt), bool(ok))
            for lam, n0, nt, ok in zip(curve.lambdas, curve.invariant, curve.total, curve.complete)
        ]
        summary = {
            "invariant_exponent": fit_growth_exponent(curve.lambdas, curve.invariant),
            "total_exponent": fit_growth_exponent(curve.lambdas, curve.total),
            "resolution": N,
            "alpha_max": alpha_max,
        }
        logger.info(
            "weyl exponents: invariant %.3f, total %.3f",
            summary["invariant_exponent"], summary["total_exponent"],
        )
        return {"scenario": "weyl", "header": WEYL_COLUMNS, "rows": rows, "summary": summary}
