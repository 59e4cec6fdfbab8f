"""
Bundle configurations, torus weights and invariant metrics on the base grid.

An invariant metric on a principal T^d bundle over the flat 2-torus is stored
in split form: the fiber Gram matrix G, the connection coefficients A^j of the
horizontal distribution and the metric h on horizontal vectors. All three are
sampled on an N×N grid with spacing Δ = 2π/N.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from bundle_spectra.errors import MetricNotPositiveError, UnsupportedConfigurationError


TWO_PI = 2.0 * np.pi

#: Default lower bound for the eigenvalues of G and h.
DEFAULT_SPD_FLOOR = 1e-6


@dataclass(frozen=True)
class BundleConfig:
    """Topology and resolution of a torus bundle over the flat 2-torus.

    Parameters
    ----------
    d : int
        Dimension of the torus fiber.
    euler : int
        Euler number of the circle bundle. Must be 0 unless ``d == 1``.
    resolution : int
        Grid points per base coordinate.

    Examples
    --------
    >>> config = BundleConfig(d=1, euler=1, resolution=32)
    >>> config.n
    3
    """

    d: int = 1
    euler: int = 0
    resolution: int = 32

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if int(self.euler) != self.euler:
            raise ValueError(f"euler must be an integer, got {self.euler}")
        if int(self.resolution) != self.resolution or self.resolution < 3:
            raise ValueError(
                f"resolution must be an integer >= 3, got {self.resolution}"
            )
        if self.euler != 0 and self.d != 1:
            raise UnsupportedConfigurationError(
                f"euler = {self.euler} requires d = 1 (torus bundles with d >= 2 "
                f"are trivial here), got d = {self.d}"
            )
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "euler", int(self.euler))
        object.__setattr__(self, "resolution", int(self.resolution))

    @property
    def n(self) -> int:
        """Dimension of the total space."""
        return self.d + 2

    @property
    def spacing(self) -> float:
        return TWO_PI / self.resolution

    @property
    def grid_shape(self) -> Tuple[int, int]:
        return (self.resolution, self.resolution)

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Base coordinates (x, y) of every grid node, indexed [p, q]."""
        axis = self.spacing * np.arange(self.resolution)
        return np.meshgrid(axis, axis, indexing="ij")

    def to_dict(self) -> Dict[str, int]:
        return {"d": self.d, "euler": self.euler, "resolution": self.resolution}


@dataclass(frozen=True)
class Weight:
    """Integer weight α labelling an irreducible representation of T^d."""

    alpha: Tuple[int, ...]

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.alpha))
        if values.ndim != 1 or values.size == 0:
            raise ValueError(f"alpha must be a non-empty integer vector, got {self.alpha}")
        if not np.all(np.equal(np.mod(values, 1), 0)):
            raise ValueError(f"alpha must be integral, got {self.alpha}")
        object.__setattr__(self, "alpha", tuple(int(v) for v in values))

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def is_zero(self) -> bool:
        return not any(self.alpha)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float)

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.alpha))

    def canonical(self) -> "Weight":
        """Representative of {α, −α} whose first nonzero entry is positive."""
        for a in self.alpha:
            if a != 0:
                return self if a > 0 else -self
        return self

    def __str__(self) -> str:
        if len(self.alpha) == 1:
            return str(self.alpha[0])
        return "(" + ",".join(str(a) for a in self.alpha) + ")"


WeightLike = Union[int, Sequence[int], np.ndarray, Weight]


def as_weight(value: WeightLike, d: Optional[int] = None) -> Weight:
    """Coerce an int, sequence or Weight into a Weight of length ``d``."""
    weight = value if isinstance(value, Weight) else Weight(value)
    if d is not None and weight.d != d:
        raise ValueError(f"weight {weight} has length {weight.d}, expected d = {d}")
    return weight


def background_connection(config: BundleConfig) -> np.ndarray:
    """Linear background potential (e/2π)·x·dy sampled at the grid nodes.

    Returns an array of shape (N, N, d, 2), zero when ``euler == 0``.
    """
    N, d = config.resolution, config.d
    background = np.zeros((N, N, d, 2))
    if config.euler != 0:
        x, _ = config.coordinates()
        background[:, :, 0, 1] = config.euler * x / TWO_PI
    return background


def min_eigenvalue_field(field_: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of a grid field of symmetric matrices."""
    return np.linalg.eigvalsh(field_)[..., 0]


def check_positive(name: str, field_: np.ndarray, floor: float) -> None:
    """Raise MetricNotPositiveError naming the first point below ``floor``."""
    lowest = min_eigenvalue_field(field_)
    if not np.all(np.isfinite(lowest)) or np.min(lowest) < floor:
        bad = np.where(~np.isfinite(lowest), -np.inf, lowest)
        point = tuple(int(i) for i in np.unravel_index(np.argmin(bad), bad.shape))
        raise MetricNotPositiveError(
            f"{name} has smallest eigenvalue {float(bad[point]):.6g} at grid "
            f"point {point}, below the SPD floor {floor:g}",
            point=point,
        )


def _as_field(name: str, values: Any, shape: Tuple[int, ...]) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite entries")
    return array


def _symmetrize(name: str, array: np.ndarray) -> np.ndarray:
    transposed = np.swapaxes(array, -1, -2)
    scale = max(1.0, float(np.max(np.abs(array))))
    if np.max(np.abs(array - transposed)) > 1e-10 * scale:
        raise ValueError(f"{name} must be symmetric at every grid point")
    return 0.5 * (array + transposed)


@dataclass(frozen=True, eq=False)
class InvariantMetric:
    """T^d-invariant metric in split form (G, A, h) on the base grid.

    Parameters
    ----------
    config : BundleConfig
        Bundle topology and resolution.
    G : np.ndarray
        Fiber Gram matrices, shape (N, N, d, d).
    A : np.ndarray
        Periodic part of the connection coefficients, shape (N, N, d, 2) with
        ``A[p, q, j, i] = A^j_i``. For ``euler != 0`` the background
        (e/2π)·x·dy is implicit.
    h : np.ndarray
        Horizontal metric, shape (N, N, 2, 2).
    spd_floor : float, optional
        Lower bound enforced on the eigenvalues of G and h.
    provenance : dict, optional
        Free-form record of how the metric was produced (seed, preset, path).

    Notes
    -----
    The arrays are copied and made read-only on construction.
    """

    config: BundleConfig
    G: np.ndarray
    A: np.ndarray
    h: np.ndarray
    spd_floor: float = DEFAULT_SPD_FLOOR
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        N, d = self.config.resolution, self.config.d
        if not self.spd_floor > 0:
            raise ValueError(f"spd_floor must be positive, got {self.spd_floor}")

        G = _symmetrize("G", _as_field("G", self.G, (N, N, d, d)))
        A = _as_field("A", self.A, (N, N, d, 2))
        h = _symmetrize("h", _as_field("h", self.h, (N, N, 2, 2)))
        check_positive("G", G, self.spd_floor)
        check_positive("h", h, self.spd_floor)

        for array in (G, A, h):
            array.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def resolution(self) -> int:
        return self.config.resolution

    def total_connection(self) -> np.ndarray:
        """Connection coefficients including the background potential."""
        return self.A + background_connection(self.config)

    def G_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.G)

    def h_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.h)

    def volume_density(self) -> np.ndarray:
        """Riemannian volume density √(det G · det h) at each node."""
        return np.sqrt(np.linalg.det(self.G) * np.linalg.det(self.h))

    def potential(self, alpha: WeightLike) -> np.ndarray:
        """Vertical potential V = αᵀ G⁻¹ α at each node."""
        a = as_weight(alpha, self.config.d).as_array()
        return np.einsum("j,pqjk,k->pq", a, self.G_inverse(), a)

    def connection_potential(self, alpha: WeightLike) -> np.ndarray:
        """Periodic magnetic potential a_i = Σ_j α_j A^j_i, shape (N, N, 2)."""
        a = as_weight(alpha, self.config.d).as_array()
        return np.einsum("j,pqji->pqi", a, self.A)

    def replace(self, **changes: Any) -> "InvariantMetric":
        """Return a copy with some fields replaced (validated again)."""
        values = {
            "config": self.config,
            "G": self.G,
            "A": self.A,
            "h": self.h,
            "spd_floor": self.spd_floor,
            "provenance": self.provenance,
        }
        values.update(changes)
        return InvariantMetric(**values)


def flat_metric(
    config: BundleConfig,
    G: Optional[Any] = None,
    h: Optional[Any] = None,
    A: Optional[Any] = None,
    spd_floor: float = DEFAULT_SPD_FLOOR,
    provenance: Optional[Dict[str, Any]] = None,
) -> InvariantMetric:
    """Constant metric; G, h default to the identity and A to zero.

    Parameters
    ----------
    config : BundleConfig
        Bundle topology and resolution.
    G : array_like, optional
        Constant d×d fiber Gram matrix.
    h : array_like, optional
        Constant 2×2 horizontal metric.
    A : array_like, optional
        Constant d×2 periodic connection part.

    Examples
    --------
    >>> metric = flat_metric(BundleConfig(d=1, resolution=16), G=[[3.0]])
    >>> metric.potential(2)[0, 0]
    1.3333333333333333
    """
    N, d = config.resolution, config.d
    G0 = np.eye(d) if G is None else np.asarray(G, dtype=float).reshape(d, d)
    h0 = np.eye(2) if h is None else np.asarray(h, dtype=float).reshape(2, 2)
    A0 = np.zeros((d, 2)) if A is None else np.asarray(A, dtype=float).reshape(d, 2)
    return InvariantMetric(
        config=config,
        G=np.broadcast_to(G0, (N, N, d, d)),
        A=np.broadcast_to(A0, (N, N, d, 2)),
        h=np.broadcast_to(h0, (N, N, 2, 2)),
        spd_floor=spd_floor,
        provenance=dict(provenance or {"kind": "flat"}),
    )
