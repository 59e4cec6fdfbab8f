"""
Metric construction shared by the experiment drivers.
"""

import logging
from typing import Optional

from bundle_spectra.geometry import BundleConfig, InvariantMetric, flat_metric, get_preset, sample_random_metric

logger = logging.getLogger(__name__)


def build_metric(
    d: int = 1,
    euler: int = 0,
    resolution: int = 32,
    preset: Optional[str] = None,
    seed: int = 0,
    modes: int = 2,
    amplitude: float = 0.0,
) -> InvariantMetric:
    """Preset or flat metric, randomly perturbed when ``amplitude`` > 0.

    A preset fixes d and the Euler number; ``d`` and ``euler`` are then
    ignored.

    Examples
    --------
    >>> metric = build_metric(euler=1, resolution=16, seed=3, amplitude=0.2)
    >>> metric.config.euler
    1
    """
    if preset is not None:
        base = get_preset(preset, resolution)
        if (base.config.d, base.config.euler) != (d, euler):
            logger.info(
                "preset %s fixes d=%d, e=%d", preset, base.config.d, base.config.euler
            )
    else:
        base = flat_metric(BundleConfig(d=d, euler=euler, resolution=resolution))
    if amplitude == 0:
        return base
    return sample_random_metric(base.config, seed, modes=modes, amplitude=amplitude, base=base)
