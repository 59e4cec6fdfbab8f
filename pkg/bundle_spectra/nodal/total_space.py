"""
Real weight-α fields sampled on the total space of a circle bundle.

The total space of the d = 1 bundle is the cube [0, 2π)³ in (x, y, θ) with

    (x, y + 2π, θ) ~ (x, y, θ),   (x, y, θ + 2π) ~ (x, y, θ),
    (x + 2π, y, θ) ~ (x, y, θ + e·y).

On an N × N × N_θ grid the x-wrap becomes the integer θ-shift e·q·N_θ/N on
row q, which is exact when N_θ is a multiple of N·|e|.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from bundle_spectra.errors import DiscretizationError, UnsupportedConfigurationError
from bundle_spectra.geometry.metric import TWO_PI, WeightLike, as_weight

logger = logging.getLogger(__name__)

AXES = ("x", "y", "theta")


def minimal_theta_resolution(resolution: int, euler: int) -> int:
    """Smallest N_θ for which the twist is an integer shift (0 if any works)."""
    return resolution * abs(euler)


def _check_theta_resolution(resolution: int, euler: int, n_theta: int) -> None:
    if n_theta < 2:
        raise DiscretizationError(f"n_theta must be at least 2, got {n_theta}", minimal=2)
    if euler != 0:
        minimal = minimal_theta_resolution(resolution, euler)
        if n_theta % minimal != 0:
            raise DiscretizationError(
                f"n_theta = {n_theta} is not a multiple of N·|e| = {minimal}; "
                f"the smallest admissible value is {minimal}",
                minimal=minimal,
            )


@dataclass(frozen=True, eq=False)
class TotalSpaceField:
    """Samples of u₁ (and optionally u₂) on the twisted product grid.

    Attributes
    ----------
    values : np.ndarray
        u₁ on the grid, shape (N, N, N_θ).
    euler : int
        Euler number e of the bundle; fixes the x-wrap twist.
    alpha : int
        Weight of the field; used for the exact θ-derivative α·u₂.
    companion : np.ndarray, optional
        u₂ = Im(e^{−iαθ}φ), same shape as ``values``.
    """

    values: np.ndarray
    euler: int = 0
    alpha: int = 0
    companion: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3 or values.shape[0] != values.shape[1]:
            raise ValueError(f"values must have shape (N, N, N_theta), got {values.shape}")
        if values.shape[0] < 3:
            raise ValueError(f"resolution must be at least 3, got {values.shape[0]}")
        _check_theta_resolution(values.shape[0], self.euler, values.shape[2])
        object.__setattr__(self, "values", values)
        if self.companion is not None:
            companion = np.asarray(self.companion, dtype=float)
            if companion.shape != values.shape:
                raise ValueError(
                    f"companion must have shape {values.shape}, got {companion.shape}"
                )
            object.__setattr__(self, "companion", companion)

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def row_shift(self) -> np.ndarray:
        """θ-index shift applied when crossing the x-wrap on each row q."""
        N = self.resolution
        return (self.euler * np.arange(N) * self.n_theta) // N

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values**2)))

    def negated(self) -> "TotalSpaceField":
        companion = None if self.companion is None else -self.companion
        return TotalSpaceField(-self.values, self.euler, self.alpha, companion)

    def swapped(self) -> "TotalSpaceField":
        """The u₂ field as a TotalSpaceField (its companion is −u₁)."""
        if self.companion is None:
            raise ValueError("field has no companion to swap in")
        return TotalSpaceField(self.companion, self.euler, self.alpha, -self.values)

    def neighbor_index(self, axis: int, step: int = 1) -> np.ndarray:
        """Flat index of the neighbour of every cell along ``axis``.

        ``step`` is +1 or −1. The x-wrap applies the row twist.
        """
        if step not in (1, -1):
            raise ValueError(f"step must be +1 or -1, got {step}")
        N, n_theta = self.resolution, self.n_theta
        p, q, r = np.indices(self.shape)
        if axis == 0:
            target = p + step
            shift = self.row_shift[q]
            r = np.where(target == N, r + shift, np.where(target == -1, r - shift, r))
            p = target % N
        elif axis == 1:
            q = (q + step) % N
        elif axis == 2:
            r = r + step
        else:
            raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
        return np.ravel_multi_index((p, q, r % n_theta), self.shape)

    def neighbor(self, cell: Tuple[int, int, int], axis: int, step: int = 1) -> Tuple[int, int, int]:
        """Neighbour of a single cell; the scalar twin of :meth:`neighbor_index`."""
        N, n_theta = self.resolution, self.n_theta
        p, q, r = cell
        if axis == 0:
            p += step
            if p == N:
                p, r = 0, r + self.euler * q * n_theta // N
            elif p == -1:
                p, r = N - 1, r - self.euler * q * n_theta // N
        elif axis == 1:
            q = (q + step) % N
        else:
            r += step
        return p, q, r % n_theta

    def gradient(self) -> np.ndarray:
        """Centred-difference gradient (∂_x, ∂_y, ∂_θ) on the cells, shape (..., 3).

        With a companion field the θ-derivative is the exact α·u₂.
        """
        flat = self.values.ravel()
        h_base = TWO_PI / self.resolution
        h_theta = TWO_PI / self.n_theta
        components = []
        for axis, spacing in ((0, h_base), (1, h_base), (2, h_theta)):
            if axis == 2 and self.companion is not None:
                components.append(self.alpha * self.companion)
                continue
            forward = flat[self.neighbor_index(axis, 1)]
            backward = flat[self.neighbor_index(axis, -1)]
            components.append((forward - backward) / (2.0 * spacing))
        return np.stack(components, axis=-1)


def theta_grid(n_theta: int) -> np.ndarray:
    return TWO_PI * np.arange(n_theta) / n_theta


def reconstruct_total_space(
    phi: np.ndarray, alpha: WeightLike, euler: int, n_theta: int
) -> TotalSpaceField:
    """Sample u₁ = Re(e^{−iαθ}·φ) and u₂ = Im(e^{−iαθ}·φ) on the total space.

    Parameters
    ----------
    phi : np.ndarray
        Complex eigenfield on the base grid, shape (N, N), in the gauge of
        the assembled operator.
    alpha : int
        Weight (only d = 1 is reconstructed).
    euler : int
        Euler number of the bundle.
    n_theta : int
        Number of fiber samples.

    Raises
    ------
    DiscretizationError
        If euler ≠ 0 and n_theta is not a multiple of N·|euler|; ``minimal``
        carries N·|euler|.

    Examples
    --------
    >>> field = reconstruct_total_space(np.ones((16, 16)), 1, 0, 32)
    >>> np.allclose(field.values[0, 0], np.cos(theta_grid(32)))
    True
    """
    weight = as_weight(alpha)
    if weight.d != 1:
        raise UnsupportedConfigurationError(
            f"total-space reconstruction needs d = 1, got weight {weight}"
        )
    a = weight.alpha[0]
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"phi must have shape (N, N), got {phi.shape}")
    _check_theta_resolution(phi.shape[0], euler, n_theta)
    fiber = np.exp(-1j * a * theta_grid(n_theta))
    w = phi[:, :, None] * fiber[None, None, :]
    logger.debug("reconstructed %s field with alpha=%d, e=%d", w.shape, a, euler)
    return TotalSpaceField(w.real, euler=euler, alpha=a, companion=w.imag)


def wrap_consistency_residual(field: TotalSpaceField, phi: np.ndarray, op) -> float:
    """Mismatch between the x-wrap twist and the operator's boundary cocycle.

    Continuing φ across the x-wrap with the transition factor of ``op``
    must reproduce the samples the twist identifies with x = 0. The result
    is the maximum deviation divided by the field's RMS.
    """
    phi = np.asarray(phi, dtype=complex)
    N = field.resolution
    if phi.shape != (N, N):
        raise ValueError(f"phi must have shape {(N, N)}, got {phi.shape}")
    continued = np.asarray(op.transition)[:, None] * phi[0, :, None]
    fiber = np.exp(-1j * field.alpha * theta_grid(field.n_theta))
    predicted = np.real(continued * fiber[None, :])

    wrapped = field.values.ravel()[field.neighbor_index(0, 1)].reshape(field.shape)[N - 1]
    return float(np.max(np.abs(wrapped - predicted)) / max(field.rms(), np.finfo(float).tiny))
