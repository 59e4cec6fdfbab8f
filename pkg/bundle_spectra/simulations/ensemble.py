"""
Genericity statistics over ensembles of random invariant metrics.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from bundle_spectra.geometry.metric import WeightLike, as_weight
from bundle_spectra.nodal import DEFAULT_ZERO_TOL
from bundle_spectra.simulations.nodal import NodalSimulation
from bundle_spectra.simulations.scenarios import build_metric
from bundle_spectra.solvers import LanczosSolver, collisions_from_spectra, weight_spectra

logger = logging.getLogger(__name__)

ENSEMBLE_COLUMNS = ("seed", "collisions", "max_cluster", "domain_count", "regular_margin")


class EnsembleRow(NamedTuple):
    seed: int
    collisions: int
    max_cluster: int
    domain_count: Optional[int]
    regular_margin: Optional[float]


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-seed rows with aggregates recomputable from them.

    ``simple_fraction`` counts members whose nonzero-weight clusters all
    have complex multiplicity 1.
    """

    rows: List[EnsembleRow] = field(default_factory=list)
    collision_fraction: float = float("nan")
    simple_fraction: float = float("nan")
    median_domain_count: Optional[float] = None
    median_regular_margin: Optional[float] = None

    @classmethod
    def from_rows(cls, rows: Sequence[EnsembleRow]) -> "EnsembleSummary":
        rows = list(rows)
        if not rows:
            return cls(rows=[])
        domains = [r.domain_count for r in rows if r.domain_count is not None]
        margins = [r.regular_margin for r in rows if r.regular_margin is not None]
        return cls(
            rows=rows,
            collision_fraction=float(np.mean([r.collisions > 0 for r in rows])),
            simple_fraction=float(np.mean([r.max_cluster <= 1 for r in rows])),
            median_domain_count=float(np.median(domains)) if domains else None,
            median_regular_margin=float(np.median(margins)) if margins else None,
        )

    def aggregates(self) -> Dict[str, object]:
        data = asdict(self)
        data.pop("rows")
        data["size"] = len(self.rows)
        return data


def member_seeds(seed: int, size: int) -> List[int]:
    """Independent per-member seeds derived from one root seed."""
    if size < 0:
        raise ValueError(f"ensemble size must be non-negative, got {size}")
    children = np.random.SeedSequence(seed).spawn(size)
    return [int(child.generate_state(1)[0]) for child in children]


def run_member(
    seed: int,
    d: int,
    euler: int,
    resolution: int,
    preset: Optional[str],
    modes: int,
    amplitude: float,
    weights: Sequence[WeightLike],
    m: int,
    collision_tol: float,
    cluster_tol: float,
    nodal: bool,
    zero_tol: float,
) -> EnsembleRow:
    """One ensemble member; top level so worker processes can pickle it."""
    metric = build_metric(d, euler, resolution, preset, seed, modes, amplitude)
    solver = LanczosSolver(cluster_tol=cluster_tol)
    resolved = [as_weight(w, metric.config.d) for w in weights]
    spectra = weight_spectra(metric, resolved, m, solver)
    collisions = collisions_from_spectra(spectra, collision_tol)
    max_cluster = max(
        (p.multiplicity for w, pairs in spectra.items() if not w.is_zero for p in pairs),
        default=0,
    )
    domain_count = margin = None
    nonzero = [w for w in resolved if not w.is_zero]
    if nodal and metric.config.d == 1 and nonzero:
        report = NodalSimulation(metric, solver).run(alpha=nonzero[0].alpha[0], zero_tol=zero_tol)["report"]
        domain_count, margin = report.domain_count, report.regular_margin
    return EnsembleRow(seed, len(collisions), max_cluster, domain_count, margin)


class EnsembleSimulation:
    """Collision and multiplicity statistics over random metrics.

    Parameters
    ----------
    d, euler, resolution : int
        Bundle configuration of every member.
    preset : str, optional
        Base metric around which members are sampled.
    modes : int
        Fourier modes of the sampler.
    amplitude : float
        Sampler amplitude; 0 repeats the base metric.

    Examples
    --------
    >>> sim = EnsembleSimulation(euler=1, resolution=16, amplitude=0.2)
    >>> summary = sim.run(size=4, weights=[1, 2, 3])["summary"]
    >>> summary.collision_fraction
    0.0
    """

    def __init__(
        self,
        d: int = 1,
        euler: int = 0,
        resolution: int = 24,
        preset: Optional[str] = None,
        modes: int = 2,
        amplitude: float = 0.2,
    ):
        self.d = d
        self.euler = euler
        self.resolution = resolution
        self.preset = preset
        self.modes = modes
        self.amplitude = amplitude

    def run(
        self,
        size: int = 10,
        seed: int = 0,
        weights: Sequence[WeightLike] = (1, 2, 3),
        m: int = 8,
        collision_tol: float = 1e-6,
        cluster_tol: float = 1e-8,
        nodal: bool = True,
        zero_tol: float = DEFAULT_ZERO_TOL,
        workers: int = 1,
    ) -> dict:
        """Run ``size`` members, in parallel when ``workers`` > 1.

        Rows come back in seed order whatever the scheduling.

        Returns
        -------
        result : dict
            Dictionary containing:
            - 'summary': EnsembleSummary
            - 'seeds': per-member seeds
            - 'params': run parameters
        """
        seeds = member_seeds(seed, size)
        common = (
            self.d, self.euler, self.resolution, self.preset, self.modes, self.amplitude,
            tuple(weights), m, collision_tol, cluster_tol, nodal, zero_tol,
        )
        if workers > 1 and size > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_member, s, *common) for s in seeds]
                rows = [future.result() for future in futures]
        else:
            rows = [run_member(s, *common) for s in seeds]
        for row in rows:
            logger.debug("member %s", row)
        summary = EnsembleSummary.from_rows(rows)
        logger.info(
            "ensemble of %d: collision fraction %s, simple fraction %s",
            size, summary.collision_fraction, summary.simple_fraction,
        )
        return {
            "summary": summary,
            "seeds": seeds,
            "params": {
                "size": size,
                "seed": seed,
                "weights": [str(w) for w in weights],
                "m": m,
                "collision_tol": collision_tol,
                "amplitude": self.amplitude,
                "workers": workers,
            },
        }
