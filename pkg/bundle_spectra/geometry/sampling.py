"""
Random low-frequency invariant metrics.

Every perturbation field is a real trigonometric polynomial on the base torus
with integer wave vectors (k, l), 0 < max(|k|, |l|) <= modes, taken from a
half plane so that cos/sin pairs are not repeated. Coefficients are drawn
from U[-amplitude, amplitude] and the sum is divided by sqrt(K), K the number
of basis functions. The field then has RMS amplitude/sqrt(6) whatever
``modes`` is, and its sup norm is of order ``amplitude``.
"""

import logging
from typing import Optional

import numpy as np

from bundle_spectra.geometry.metric import (
    DEFAULT_SPD_FLOOR,
    BundleConfig,
    InvariantMetric,
    flat_metric,
)

logger = logging.getLogger(__name__)


def trigonometric_basis(config: BundleConfig, modes: int) -> np.ndarray:
    """Stack of cos/sin basis functions, shape (K, N, N)."""
    if modes < 0:
        raise ValueError(f"modes must be non-negative, got {modes}")
    x, y = config.coordinates()
    basis = []
    for k in range(0, modes + 1):
        for l in range(-modes, modes + 1):
            if k == 0 and l <= 0:
                continue
            phase = k * x + l * y
            basis.append(np.cos(phase))
            basis.append(np.sin(phase))
    if not basis:
        return np.zeros((0,) + config.grid_shape)
    return np.stack(basis)


def _random_field(rng: np.random.Generator, basis: np.ndarray, amplitude: float) -> np.ndarray:
    count = basis.shape[0]
    if count == 0:
        return np.zeros(basis.shape[1:])
    coefficients = rng.uniform(-amplitude, amplitude, size=count)
    return np.tensordot(coefficients, basis, axes=1) / np.sqrt(count)


def _random_spd_factor(
    rng: np.random.Generator, basis: np.ndarray, amplitude: float, size: int
) -> np.ndarray:
    """exp(field) on the diagonal, plain fields off the diagonal."""
    N = basis.shape[1]
    factor = np.zeros((N, N, size, size))
    for j in range(size):
        factor[:, :, j, j] = np.exp(_random_field(rng, basis, amplitude))
    for j in range(size):
        for k in range(j + 1, size):
            off = _random_field(rng, basis, amplitude)
            factor[:, :, j, k] = off
            factor[:, :, k, j] = off
    return factor


def _congruence(base: np.ndarray, factor: np.ndarray) -> np.ndarray:
    L = np.linalg.cholesky(base)
    return np.einsum("pqij,pqjk,pqlk->pqil", L, factor, L)


def sample_random_metric(
    config: BundleConfig,
    seed: int,
    modes: int = 2,
    amplitude: float = 0.2,
    base: Optional[InvariantMetric] = None,
    spd_floor: float = DEFAULT_SPD_FLOOR,
) -> InvariantMetric:
    """Sample a random invariant metric around a base metric.

    Parameters
    ----------
    config : BundleConfig
        Bundle topology and resolution.
    seed : int
        Seed for ``numpy.random.default_rng``.
    modes : int, optional
        Largest wave number of the trigonometric perturbation. ``0`` gives
        the base metric itself.
    amplitude : float, optional
        Coefficient range of the perturbation. Default is 0.2.
    base : InvariantMetric, optional
        Metric to perturb. Defaults to the flat identity metric. G and h are
        perturbed by congruence with their Cholesky factors and A additively.
    spd_floor : float, optional
        SPD floor of the returned metric.

    Returns
    -------
    InvariantMetric
        Pure function of its arguments; ``provenance`` records them.

    Raises
    ------
    MetricNotPositiveError
        If the sampled fields fall below ``spd_floor`` somewhere. The error
        names the offending grid point.

    Examples
    --------
    >>> config = BundleConfig(d=1, euler=1, resolution=32)
    >>> metric = sample_random_metric(config, seed=3, modes=2, amplitude=0.2)
    >>> bool(np.linalg.eigvalsh(metric.h).min() >= 0.6)
    True
    """
    if amplitude < 0:
        raise ValueError(f"amplitude must be non-negative, got {amplitude}")
    if base is None:
        base = flat_metric(config, spd_floor=spd_floor)
    elif base.config != config:
        raise ValueError(f"base metric has config {base.config}, expected {config}")

    provenance = {
        "kind": "random",
        "seed": int(seed),
        "modes": int(modes),
        "amplitude": float(amplitude),
        "base": base.provenance.get("kind", "custom"),
    }
    basis = trigonometric_basis(config, modes)
    if basis.shape[0] == 0 or amplitude == 0:
        return base.replace(spd_floor=spd_floor, provenance=provenance)

    d = config.d
    rng = np.random.default_rng(seed)
    G_factor = _random_spd_factor(rng, basis, amplitude, d)
    A_shift = np.stack(
        [np.stack([_random_field(rng, basis, amplitude) for _ in range(2)], axis=-1)
         for _ in range(d)],
        axis=-2,
    )
    h_factor = _random_spd_factor(rng, basis, amplitude, 2)

    logger.debug(
        "sampled metric seed=%d modes=%d amplitude=%g basis=%d",
        seed, modes, amplitude, basis.shape[0],
    )
    return InvariantMetric(
        config=config,
        G=_congruence(base.G, G_factor),
        A=base.A + A_shift,
        h=_congruence(base.h, h_factor),
        spd_floor=spd_floor,
        provenance=provenance,
    )
