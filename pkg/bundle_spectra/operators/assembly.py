"""
Divergence-form assembly of the weight-α Laplacian.

A weight-α field on the total space is w = e^{−iα·θ}·φ(x, y) with φ a complex
grid field on the base. Its Laplacian reduces to a magnetic Schrödinger
operator on the base,

    Q(φ, ψ) = Σ_p ρ_p [ h^{ij} (D_iφ)(D_jψ)* + V φ ψ* ],

with covariant differences built from Peierls link phases
U = exp(i·Δ·a_mid), a_i = Σ_j α_j A^j_i, and the vertical potential
V = αᵀG⁻¹α. The horizontal term averages the four quadrant orientations of
forward/backward differences, so the cross term h^{xy} pairs centred
differences and the stencil has nine points.

For e ≠ 0 (d = 1) the background (e/2π)·x·dy contributes Δ·αe·x_p/(2π) to
every y-link and the x-wrap links carry the transition factor exp(−iαe·y).
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp

from bundle_spectra.geometry.metric import (
    TWO_PI,
    BundleConfig,
    InvariantMetric,
    Weight,
    WeightLike,
    as_weight,
)

logger = logging.getLogger(__name__)

Images = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def adjoint(matrix: sp.spmatrix) -> sp.csr_matrix:
    """Conjugate transpose of a sparse matrix in CSR form."""
    return matrix.conj().transpose().tocsr()


def _shift_matrix(links: np.ndarray, axis: int) -> sp.csr_matrix:
    """Sparse T with (Tφ)(p) = U(p)·φ(p + ê_axis)."""
    N = links.shape[0]
    index = np.arange(N * N).reshape(N, N)
    rows = index.ravel()
    cols = np.roll(index, -1, axis=axis).ravel()
    return sp.csr_matrix((links.ravel(), (rows, cols)), shape=(N * N, N * N))


@dataclass(frozen=True, eq=False)
class Stencil:
    """Grid data shared by assembly, quadratic forms and variations.

    All per-node arrays are flattened in row-major (p, q) order.
    """

    config: BundleConfig
    weight: Weight
    rho: np.ndarray
    potential: np.ndarray
    h_inv: np.ndarray
    links_x: np.ndarray
    links_y: np.ndarray
    transition: np.ndarray
    shift_x: sp.csr_matrix
    shift_y: sp.csr_matrix

    @property
    def spacing(self) -> float:
        return self.config.spacing

    @property
    def is_complex(self) -> bool:
        return not self.weight.is_zero

    def horizontal_weights(self, scale=None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """ρ·h⁻¹ components (xx, xy, yy), optionally multiplied by ``scale``."""
        weight = self.rho if scale is None else self.rho * scale
        return (
            weight * self.h_inv[:, 0, 0],
            weight * self.h_inv[:, 0, 1],
            weight * self.h_inv[:, 1, 1],
        )

    def differences(self, phi: np.ndarray) -> Images:
        """Forward and backward covariant differences (D⁺_x, D⁻_x, D⁺_y, D⁻_y)."""
        delta = self.spacing
        return (
            (self.shift_x @ phi - phi) / delta,
            (phi - self.shift_x.conj().T @ phi) / delta,
            (self.shift_y @ phi - phi) / delta,
            (phi - self.shift_y.conj().T @ phi) / delta,
        )

    def link_variation(self, phi: np.ndarray, dtheta_x: np.ndarray, dtheta_y: np.ndarray) -> Images:
        """First-order change of :meth:`differences` when link phases move by δθ.

        ``dtheta_x[p, q]`` is the change of the phase on the x-link leaving
        node (p, q); likewise for y.
        """
        delta = self.spacing
        N = self.config.resolution
        back_x = np.roll(dtheta_x.reshape(N, N), 1, axis=0).ravel()
        back_y = np.roll(dtheta_y.reshape(N, N), 1, axis=1).ravel()
        return (
            1j * dtheta_x.ravel() * (self.shift_x @ phi) / delta,
            1j * back_x * (self.shift_x.conj().T @ phi) / delta,
            1j * dtheta_y.ravel() * (self.shift_y @ phi) / delta,
            1j * back_y * (self.shift_y.conj().T @ phi) / delta,
        )

    @staticmethod
    def horizontal_pairing(images_phi: Images, images_psi: Images, weights) -> complex:
        """Σ_p of the four-quadrant horizontal integrand, linear in φ."""
        xp, xm, yp, ym = images_phi
        XP, XM, YP, YM = images_psi
        wxx, wxy, wyy = weights
        cx, cy = 0.5 * (xp + xm), 0.5 * (yp + ym)
        CX, CY = 0.5 * (XP + XM), 0.5 * (YP + YM)
        diagonal = 0.5 * np.sum(
            np.conj(XP) * wxx * xp
            + np.conj(XM) * wxx * xm
            + np.conj(YP) * wyy * yp
            + np.conj(YM) * wyy * ym
        )
        cross = np.sum(np.conj(CX) * wxy * cy + np.conj(CY) * wxy * cx)
        return diagonal + cross


def edge_phases(metric: InvariantMetric, alpha: WeightLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Link phases (θ_x, θ_y) and x-wrap transition phase for weight α.

    ``θ_x[p, q]`` belongs to the link (p, q) → (p+1, q); ``θ_y[p, q]`` to
    (p, q) → (p, q+1). The transition phase is indexed by the row q.
    """
    config = metric.config
    weight = as_weight(alpha, config.d)
    delta = config.spacing
    a = metric.connection_potential(weight)
    theta_x = 0.5 * delta * (a[..., 0] + np.roll(a[..., 0], -1, axis=0))
    theta_y = 0.5 * delta * (a[..., 1] + np.roll(a[..., 1], -1, axis=1))
    transition = np.zeros(config.resolution)
    if config.euler != 0:
        flux = weight.alpha[0] * config.euler
        x, y = config.coordinates()
        theta_y = theta_y + delta * flux * x / TWO_PI
        transition = -flux * y[0, :]
        theta_x[-1, :] += transition
    return theta_x, theta_y, transition


def build_stencil(metric: InvariantMetric, alpha: WeightLike) -> Stencil:
    """Collect masses, potential, inverse base metric and link phases."""
    config = metric.config
    weight = as_weight(alpha, config.d)
    N = config.resolution

    theta_x, theta_y, transition = edge_phases(metric, weight)
    if weight.is_zero:
        links_x, links_y = np.ones((N, N)), np.ones((N, N))
        transition_factor = np.ones(N)
    else:
        links_x, links_y = np.exp(1j * theta_x), np.exp(1j * theta_y)
        transition_factor = np.exp(1j * transition)

    rho = (metric.volume_density() * config.spacing**2).ravel()
    return Stencil(
        config=config,
        weight=weight,
        rho=rho,
        potential=metric.potential(weight).ravel(),
        h_inv=metric.h_inverse().reshape(N * N, 2, 2),
        links_x=links_x,
        links_y=links_y,
        transition=transition_factor,
        shift_x=_shift_matrix(links_x, axis=0),
        shift_y=_shift_matrix(links_y, axis=1),
    )


@dataclass(frozen=True, eq=False)
class WeightOperator:
    """Discrete Δ_{g,α} as the pencil (S, diag ρ) on N² base nodes.

    Attributes
    ----------
    stiffness : scipy.sparse.csr_matrix
        Hermitian 9-point stiffness matrix S (real symmetric for α = 0).
    mass : np.ndarray
        Lumped masses ρ_p = √(det G·det h)·Δ², shape (N²,).
    potential : np.ndarray
        Vertical potential V on the grid, shape (N, N).
    links_x, links_y : np.ndarray
        Peierls factors of the x- and y-links leaving each node.
    transition : np.ndarray
        x-wrap transition factor exp(−iαe·y_q), shape (N,).
    """

    config: BundleConfig
    weight: Weight
    stiffness: sp.csr_matrix
    mass: np.ndarray
    potential: np.ndarray
    links_x: np.ndarray
    links_y: np.ndarray
    transition: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mass.size

    @property
    def is_complex(self) -> bool:
        return not self.weight.is_zero

    @property
    def alpha(self) -> Tuple[int, ...]:
        return self.weight.alpha

    def symmetrized(self) -> sp.csr_matrix:
        """ρ^{-1/2}·S·ρ^{-1/2}, with the same spectrum as the pencil."""
        scale = sp.diags(1.0 / np.sqrt(self.mass))
        return (scale @ self.stiffness @ scale).tocsr()

    def __matmul__(self, phi: np.ndarray) -> np.ndarray:
        return apply(self, phi)


def assemble_weight_operator(metric: InvariantMetric, alpha: WeightLike) -> WeightOperator:
    """Assemble the weight-α operator of ``metric``.

    Parameters
    ----------
    metric : InvariantMetric
        Invariant metric on the bundle.
    alpha : int, sequence of int or Weight
        Torus weight, of length ``d``.

    Returns
    -------
    WeightOperator
        Stiffness, masses, potential and link phases.

    Examples
    --------
    >>> op = assemble_weight_operator(flat_metric(BundleConfig(resolution=16)), 1)
    >>> np.allclose(apply(op, np.ones(op.dimension)), 1.0)
    True
    """
    stencil = build_stencil(metric, alpha)
    N = stencil.config.resolution
    delta = stencil.spacing
    identity = sp.identity(N * N, format="csr")

    dxp = (stencil.shift_x - identity) / delta
    dxm = (identity - adjoint(stencil.shift_x)) / delta
    dyp = (stencil.shift_y - identity) / delta
    dym = (identity - adjoint(stencil.shift_y)) / delta
    cx = 0.5 * (dxp + dxm)
    cy = 0.5 * (dyp + dym)

    wxx, wxy, wyy = (sp.diags(w) for w in stencil.horizontal_weights())
    stiffness = 0.5 * (
        adjoint(dxp) @ wxx @ dxp
        + adjoint(dxm) @ wxx @ dxm
        + adjoint(dyp) @ wyy @ dyp
        + adjoint(dym) @ wyy @ dym
    )
    stiffness = stiffness + adjoint(cx) @ wxy @ cy + adjoint(cy) @ wxy @ cx
    stiffness = stiffness + sp.diags(stencil.rho * stencil.potential)
    stiffness = (0.5 * (stiffness + adjoint(stiffness))).tocsr()
    stiffness.sum_duplicates()
    stiffness.sort_indices()

    logger.debug(
        "assembled weight %s operator: N=%d nnz=%d complex=%s",
        stencil.weight, N, stiffness.nnz, stencil.is_complex,
    )
    return WeightOperator(
        config=stencil.config,
        weight=stencil.weight,
        stiffness=stiffness,
        mass=stencil.rho,
        potential=stencil.potential.reshape(N, N),
        links_x=stencil.links_x,
        links_y=stencil.links_y,
        transition=stencil.transition,
    )


def _flatten(phi: np.ndarray, dimension: int, name: str = "phi") -> np.ndarray:
    phi = np.asarray(phi)
    if phi.size != dimension or phi.ndim not in (1, 2):
        raise ValueError(
            f"{name} must have {dimension} entries (flat or N×N), got shape {phi.shape}"
        )
    return phi.reshape(dimension)


def apply(op: WeightOperator, phi: np.ndarray) -> np.ndarray:
    """Apply ρ⁻¹·S to a grid field; the output has the shape of ``phi``."""
    flat = _flatten(phi, op.dimension)
    return (op.stiffness @ flat / op.mass).reshape(np.shape(phi))


@dataclass(frozen=True)
class QuadraticFormValue:
    """Hermitian pairing Q(φ, ψ) split into vertical and horizontal parts."""

    vertical: Union[float, complex]
    horizontal: Union[float, complex]

    @property
    def value(self) -> Union[float, complex]:
        return self.vertical + self.horizontal


def quadratic_form(
    metric: InvariantMetric, alpha: WeightLike, phi: np.ndarray, psi: np.ndarray
) -> QuadraticFormValue:
    """Evaluate Q(φ, ψ), linear in φ and conjugate-linear in ψ.

    The value equals ψᴴ·S·φ for the assembled stiffness S. Real arguments
    with α = 0 give real parts.
    """
    stencil = build_stencil(metric, alpha)
    dimension = stencil.rho.size
    phi_flat = _flatten(phi, dimension, "phi")
    psi_flat = _flatten(psi, dimension, "psi")

    vertical = np.sum(stencil.rho * stencil.potential * phi_flat * np.conj(psi_flat))
    horizontal = stencil.horizontal_pairing(
        stencil.differences(phi_flat),
        stencil.differences(psi_flat),
        stencil.horizontal_weights(),
    )
    if not stencil.is_complex and np.isrealobj(phi_flat) and np.isrealobj(psi_flat):
        return QuadraticFormValue(float(np.real(vertical)), float(np.real(horizontal)))
    return QuadraticFormValue(complex(vertical), complex(horizontal))


def plaquette_fluxes(op: WeightOperator) -> np.ndarray:
    """Principal phase of the link product around each plaquette.

    Entry [p, q] belongs to the plaquette with lower-left corner (p, q),
    traversed counter-clockwise. The phases sum to 2π·α·e.
    """
    ux, uy = op.links_x, op.links_y
    product = ux * np.roll(uy, -1, axis=0) * np.conj(np.roll(ux, -1, axis=1)) * np.conj(uy)
    return np.angle(product)
