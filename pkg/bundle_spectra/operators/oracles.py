"""
Closed-form spectra of constant metrics.
"""

from typing import Optional

import numpy as np

from bundle_spectra.geometry.metric import TWO_PI, BundleConfig, WeightLike, as_weight


def flat_spectrum(
    config: BundleConfig,
    alpha: WeightLike,
    G=None,
    h=None,
    A=None,
    count: Optional[int] = None,
    discrete: bool = True,
) -> np.ndarray:
    """Eigenvalues of the weight-α operator of a constant metric, e = 0.

    Plane waves e^{i(kx+ly)} diagonalize the operator. With ``discrete=True``
    the symbols of the assembled stencil are used,

        V + h^{xx}·s(k̃) + h^{yy}·s(l̃) + 2h^{xy}·sin(k̃Δ)·sin(l̃Δ)/Δ²,

    where s(k) = (2 − 2cos kΔ)/Δ² and k̃ = k + a_x is shifted by the constant
    magnetic potential. With ``discrete=False`` the continuum values
    V + (k̃, l̃)·h⁻¹·(k̃, l̃) are returned for the same N² wave vectors.

    Returns
    -------
    np.ndarray
        Sorted eigenvalues, the lowest ``count`` of them if given.

    Examples
    --------
    >>> config = BundleConfig(d=1, resolution=32)
    >>> flat_spectrum(config, 1, G=[[1.0]], count=5, discrete=False)
    array([1., 2., 2., 2., 2.])
    """
    if config.euler != 0:
        raise ValueError("flat_spectrum describes trivial bundles only (euler = 0)")
    d, N = config.d, config.resolution
    weight = as_weight(alpha, d).as_array()
    G = np.eye(d) if G is None else np.asarray(G, dtype=float).reshape(d, d)
    h = np.eye(2) if h is None else np.asarray(h, dtype=float).reshape(2, 2)
    A = np.zeros((d, 2)) if A is None else np.asarray(A, dtype=float).reshape(d, 2)

    V = weight @ np.linalg.solve(G, weight)
    h_inv = np.linalg.inv(h)
    a = weight @ A
    waves = np.fft.fftfreq(N, d=1.0 / N)
    k, l = np.meshgrid(waves + a[0], waves + a[1], indexing="ij")
    delta = config.spacing
    if discrete:
        sx = (2.0 - 2.0 * np.cos(k * delta)) / delta**2
        sy = (2.0 - 2.0 * np.cos(l * delta)) / delta**2
        cross = np.sin(k * delta) * np.sin(l * delta) / delta**2
    else:
        sx, sy, cross = k**2, l**2, k * l
    values = V + h_inv[0, 0] * sx + h_inv[1, 1] * sy + 2.0 * h_inv[0, 1] * cross
    values = np.sort(values.ravel())
    return values if count is None else values[:count]


def landau_ground_value(alpha: int, euler: int, G=1.0, h=None) -> float:
    """Lowest continuum eigenvalue for a constant metric on a nontrivial bundle.

    The background field has strength B = αe/(2π) per unit coordinate area,
    so the ground value is α²/G + |B|/√det h.

    Examples
    --------
    >>> round(landau_ground_value(1, 1), 5)
    1.15915
    """
    G = float(np.asarray(G, dtype=float).reshape(-1)[0])
    h = np.eye(2) if h is None else np.asarray(h, dtype=float).reshape(2, 2)
    field_strength = abs(alpha * euler) / TWO_PI
    return alpha**2 / G + field_strength / np.sqrt(np.linalg.det(h))
