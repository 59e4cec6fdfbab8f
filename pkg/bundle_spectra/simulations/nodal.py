"""
Nodal analysis of a weight-α eigenfield on the total space.
"""

import logging
from typing import Optional

import numpy as np

from bundle_spectra.errors import UnsupportedConfigurationError
from bundle_spectra.geometry.metric import InvariantMetric
from bundle_spectra.nodal import DEFAULT_ZERO_TOL, dump_sign_array, nodal_report, reconstruct_total_space
from bundle_spectra.operators import assemble_weight_operator
from bundle_spectra.solvers import LanczosSolver

logger = logging.getLogger(__name__)


def default_theta_resolution(resolution: int, euler: int) -> int:
    """2·N·max(1, |e|), which satisfies the twist divisibility rule."""
    return 2 * resolution * max(1, abs(euler))


class NodalSimulation:
    """Reconstruct an eigenfield on the total space and count its nodal pieces.

    Parameters
    ----------
    metric : InvariantMetric
        Metric of a circle bundle (d = 1).
    solver : LanczosSolver, optional
        Eigensolver for the base operator.

    Examples
    --------
    >>> sim = NodalSimulation(build_metric(euler=1, resolution=16, seed=1, amplitude=0.2))
    >>> sim.run(alpha=1)["report"].domain_count
    2
    """

    def __init__(self, metric: InvariantMetric, solver: Optional[LanczosSolver] = None):
        if metric.config.d != 1:
            raise UnsupportedConfigurationError(
                f"nodal analysis needs a circle bundle (d = 1), got d = {metric.config.d}"
            )
        self.metric = metric
        self.solver = solver or LanczosSolver()

    def run(
        self,
        alpha: int = 1,
        index: int = 0,
        n_theta: Optional[int] = None,
        zero_tol: float = DEFAULT_ZERO_TOL,
        synthetic: bool = False,
        sign_dump: Optional[str] = None,
    ) -> dict:
        """Build the NodalReport of eigenfield ``index`` of weight ``alpha``.

        Parameters
        ----------
        alpha : int
            Weight of the eigenfield.
        index : int
            Position of the eigenfield in the ascending spectrum.
        n_theta : int, optional
            Fiber samples; defaults to :func:`default_theta_resolution`.
        zero_tol : float
            Relative threshold for neutral cells.
        synthetic : bool
            Use φ ≡ 1 instead of an eigenfield.
        sign_dump : str, optional
            Write the packed sign array to this path.

        Returns
        -------
        result : dict
            Dictionary containing:
            - 'report': NodalReport
            - 'field': TotalSpaceField
            - 'phi': base field that was reconstructed
            - 'eigenvalue': its eigenvalue (None when synthetic)
        """
        config = self.metric.config
        n_theta = n_theta or default_theta_resolution(config.resolution, config.euler)
        op = assemble_weight_operator(self.metric, alpha)
        if synthetic:
            phi = np.ones(config.grid_shape, dtype=complex)
            eigenvalue = None
        else:
            pair = self.solver.solve(op, min(index + 2, op.dimension - 1))[index]
            phi, eigenvalue = pair.vector, pair.eigenvalue
            if pair.multiplicity > 1:
                logger.warning(
                    "eigenvalue %.12g has multiplicity %d; the field is one member of the cluster",
                    eigenvalue, pair.multiplicity,
                )
        field = reconstruct_total_space(phi, alpha, config.euler, n_theta)
        report = nodal_report(field, phi, op=op, zero_tol=zero_tol)
        if sign_dump is not None:
            dump_sign_array(field, sign_dump, zero_tol)
        return {"report": report, "field": field, "phi": phi, "eigenvalue": eigenvalue}
