"""
Discrete gauge transformations of the connection.

A real periodic field χ^j per fiber direction shifts A^j by −∇̃χ^j, where ∇̃
is the Fourier multiplier (2i/Δ)·tan(kΔ/2). With that multiplier the edge
midpoint average of the shift equals the forward difference of χ exactly,
so every link phase changes by −α·(χ(p+ê) − χ(p)) and the operator is
conjugated by the diagonal phase e^{iα·χ}.
"""

import numpy as np

from bundle_spectra.geometry.metric import InvariantMetric, WeightLike, as_weight


def _gauge_field(metric: InvariantMetric, chi) -> np.ndarray:
    N, d = metric.resolution, metric.config.d
    chi = np.asarray(chi, dtype=float)
    if d == 1 and chi.shape == (N, N):
        chi = chi[None]
    if chi.shape != (d, N, N):
        raise ValueError(f"chi must have shape {(d, N, N)} (or {(N, N)} for d = 1), got {chi.shape}")
    return chi


def tangent_gradient(chi: np.ndarray, spacing: float) -> np.ndarray:
    """Apply (2i/Δ)·tan(kΔ/2) along both base axes of ``chi[..., N, N]``.

    Returns an array of shape chi.shape + (2,).

    Raises
    ------
    ValueError
        If ``chi`` has a Nyquist component, where the multiplier is singular.
    """
    N = chi.shape[-1]
    k = np.fft.fftfreq(N, d=1.0 / N)
    multiplier = 2j / spacing * np.tan(0.5 * k * spacing)
    chi_hat = np.fft.fft2(chi, axes=(-2, -1))
    if N % 2 == 0:
        nyquist = N // 2
        tail = max(
            np.max(np.abs(chi_hat[..., nyquist, :])),
            np.max(np.abs(chi_hat[..., :, nyquist])),
        )
        if tail > 1e-10 * max(1.0, float(np.max(np.abs(chi_hat)))):
            raise ValueError(
                "chi has a Nyquist component (wave number N/2), which has no "
                "discrete gradient consistent with midpoint link phases"
            )
        multiplier[nyquist] = 0.0
    grad_x = np.real(np.fft.ifft2(multiplier[:, None] * chi_hat, axes=(-2, -1)))
    grad_y = np.real(np.fft.ifft2(multiplier[None, :] * chi_hat, axes=(-2, -1)))
    return np.stack([grad_x, grad_y], axis=-1)


def gauge_transform(metric: InvariantMetric, chi) -> InvariantMetric:
    """Shift the connection by a discrete gradient.

    Parameters
    ----------
    metric : InvariantMetric
        Metric to transform.
    chi : array_like
        Real periodic gauge field, shape (d, N, N) or (N, N) when d = 1.

    Returns
    -------
    InvariantMetric
        Metric with A^j replaced by A^j − ∇̃χ^j. The weight-α operators of the
        two metrics are related by S' = Φ·S·Φᴴ with Φ = diag(e^{iα·χ}), see
        :func:`gauge_phase`. A constant χ returns ``metric`` unchanged.
    """
    chi = _gauge_field(metric, chi)
    if np.all(chi == chi[:, :1, :1]):
        return metric
    gradient = tangent_gradient(chi, metric.config.spacing)
    A = metric.A - np.moveaxis(gradient, 0, -2)
    provenance = {**metric.provenance, "gauge": True}
    return metric.replace(A=A, provenance=provenance)


def gauge_phase(metric: InvariantMetric, alpha: WeightLike, chi) -> np.ndarray:
    """Diagonal phase e^{iα·χ} mapping fields of ``metric`` to the gauged ones."""
    chi = _gauge_field(metric, chi)
    a = as_weight(alpha, metric.config.d).as_array()
    return np.exp(1j * np.tensordot(a, chi, axes=1))
