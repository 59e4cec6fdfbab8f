"""
Conversions between the split form (G, A, h) and frame components.

Frame components are taken in the coordinate frame {∂_1..∂_d, ∂_x, ∂_y}:

    M = [[G,      G·A        ],
         [Aᵀ·G,   h + Aᵀ·G·A ]]

with A the d×2 matrix of connection coefficients (background included).
"""

from typing import Tuple

import numpy as np

from bundle_spectra.geometry.metric import (
    DEFAULT_SPD_FLOOR,
    BundleConfig,
    InvariantMetric,
    background_connection,
    check_positive,
)


def to_frame_components(metric: InvariantMetric) -> np.ndarray:
    """Frame-component matrices of the metric, shape (N, N, d+2, d+2)."""
    d = metric.config.d
    A = metric.total_connection()
    GA = np.einsum("pqjk,pqki->pqji", metric.G, A)
    M = np.empty(metric.G.shape[:2] + (d + 2, d + 2))
    M[..., :d, :d] = metric.G
    M[..., :d, d:] = GA
    M[..., d:, :d] = np.swapaxes(GA, -1, -2)
    M[..., d:, d:] = metric.h + np.einsum("pqji,pqjl->pqil", A, GA)
    return M


def split_frame_components(
    config: BundleConfig, M: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw (G, A_total, h) blocks of frame components, without validation."""
    d = config.d
    M = 0.5 * (M + np.swapaxes(M, -1, -2))
    G = M[..., :d, :d]
    A = np.linalg.solve(G, M[..., :d, d:])
    h = M[..., d:, d:] - np.einsum("pqji,pqjl->pqil", M[..., :d, d:], A)
    h = 0.5 * (h + np.swapaxes(h, -1, -2))
    return G, A, h


def from_frame_components(
    config: BundleConfig,
    M: np.ndarray,
    spd_floor: float = DEFAULT_SPD_FLOOR,
    provenance=None,
) -> InvariantMetric:
    """Inverse of :func:`to_frame_components`; strips the background potential.

    Raises
    ------
    MetricNotPositiveError
        If the fiber block or the horizontal Schur complement is not SPD.
    """
    N, d = config.resolution, config.d
    M = np.asarray(M, dtype=float)
    if M.shape != (N, N, d + 2, d + 2):
        raise ValueError(f"M must have shape {(N, N, d + 2, d + 2)}, got {M.shape}")
    check_positive("G", 0.5 * (M[..., :d, :d] + np.swapaxes(M[..., :d, :d], -1, -2)), spd_floor)
    G, A_total, h = split_frame_components(config, M)
    return InvariantMetric(
        config=config,
        G=G,
        A=A_total - background_connection(config),
        h=h,
        spd_floor=spd_floor,
        provenance=dict(provenance or {}),
    )


def lift_matrix(metric: InvariantMetric) -> np.ndarray:
    """Change of frame P from the adapted frame to coordinates.

    Columns of P are ∂_1..∂_d followed by the horizontal lifts
    ∂_i − A^j_i ∂_j of ∂_x and ∂_y.
    """
    d = metric.config.d
    N = metric.resolution
    P = np.zeros((N, N, d + 2, d + 2))
    P[..., :, :] = np.eye(d + 2)
    P[..., :d, d:] = -metric.total_connection()
    return P


def adapted_velocity(
    metric: InvariantMetric, g_dot: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """First variation (δG, δA, δh) induced by a frame-component velocity.

    Parameters
    ----------
    metric : InvariantMetric
        Base metric g₀.
    g_dot : np.ndarray
        Symmetric velocity ġ in coordinate-frame components,
        shape (N, N, d+2, d+2).

    Returns
    -------
    delta_G : np.ndarray
        ġ restricted to vertical vectors, shape (N, N, d, d).
    delta_A : np.ndarray
        Variation of the connection coefficients, G⁻¹·ġ(∂_j, lift ∂_i),
        shape (N, N, d, 2).
    delta_h : np.ndarray
        ġ on horizontal lifts, shape (N, N, 2, 2).
    """
    d = metric.config.d
    N = metric.resolution
    g_dot = np.asarray(g_dot, dtype=float)
    if g_dot.shape != (N, N, d + 2, d + 2):
        raise ValueError(
            f"g_dot must have shape {(N, N, d + 2, d + 2)}, got {g_dot.shape}"
        )
    P = lift_matrix(metric)
    adapted = np.einsum("pqai,pqab,pqbk->pqik", P, g_dot, P)
    delta_G = adapted[..., :d, :d]
    delta_A = np.linalg.solve(metric.G, adapted[..., :d, d:])
    delta_h = adapted[..., d:, d:]
    return delta_G, delta_A, delta_h


def volume_rate(metric: InvariantMetric, g_dot: np.ndarray) -> np.ndarray:
    """Relative volume variation ½·tr(g⁻¹ġ) at each node."""
    M = to_frame_components(metric)
    return 0.5 * np.einsum("pqab,pqba->pq", np.linalg.inv(M), g_dot)


def velocity_from_variations(
    metric: InvariantMetric,
    delta_G: np.ndarray,
    delta_A: np.ndarray,
    delta_h: np.ndarray,
) -> np.ndarray:
    """Coordinate-frame velocity with prescribed (δG, δA, δh).

    Inverse of :func:`adapted_velocity`: the adapted components
    [[δG, G·δA], [δAᵀ·G, δh]] are pulled back with P⁻¹ = [[I, A], [0, I]].
    """
    d = metric.config.d
    N = metric.resolution
    delta_G = np.broadcast_to(np.asarray(delta_G, dtype=float), (N, N, d, d))
    delta_A = np.broadcast_to(np.asarray(delta_A, dtype=float), (N, N, d, 2))
    delta_h = np.broadcast_to(np.asarray(delta_h, dtype=float), (N, N, 2, 2))
    cross = np.einsum("pqjk,pqki->pqji", metric.G, delta_A)
    adapted = np.empty((N, N, d + 2, d + 2))
    adapted[..., :d, :d] = delta_G
    adapted[..., :d, d:] = cross
    adapted[..., d:, :d] = np.swapaxes(cross, -1, -2)
    adapted[..., d:, d:] = delta_h
    P_inv = np.zeros((N, N, d + 2, d + 2))
    P_inv[..., :, :] = np.eye(d + 2)
    P_inv[..., :d, d:] = metric.total_connection()
    return np.einsum("pqai,pqab,pqbk->pqik", P_inv, adapted, P_inv)
