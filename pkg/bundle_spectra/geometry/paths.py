"""
One-parameter families of invariant metrics with known velocity.

Every path is linear in frame components, g_t = g₀ + t·ġ, with ġ given in
the coordinate frame {∂_1..∂_d, ∂_x, ∂_y}. Fiber indices are 0-based.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from bundle_spectra.errors import MetricNotPositiveError
from bundle_spectra.geometry.frames import from_frame_components, to_frame_components
from bundle_spectra.geometry.metric import InvariantMetric

logger = logging.getLogger(__name__)

ScalarField = Union[float, np.ndarray]


class PathKind(str, Enum):
    SPLIT_RESCALE = "split_rescale"
    RANK_ONE_VERTICAL = "rank_one_vertical"
    MIXED_VERTICAL = "mixed_vertical"
    MIXED_XY = "mixed_xy"
    GENERAL_SYMMETRIC = "general_symmetric"


def _scalar_field(name: str, value: ScalarField, metric: InvariantMetric) -> np.ndarray:
    field_ = np.broadcast_to(np.asarray(value, dtype=float), metric.G.shape[:2])
    if not np.all(np.isfinite(field_)):
        raise ValueError(f"{name} contains non-finite entries")
    return np.array(field_)


def _fiber_index(name: str, index: int, d: int) -> int:
    if not 0 <= index < d:
        raise ValueError(f"{name} must be a fiber index in [0, {d - 1}], got {index}")
    return int(index)


@dataclass(frozen=True, eq=False)
class PerturbationPath:
    """A path t ↦ g_t of invariant metrics through ``base_metric``.

    Use the constructors (:meth:`split_rescale`, :meth:`rank_one_vertical`,
    :meth:`mixed_vertical`, :meth:`mixed_xy`, :meth:`general`) rather than
    the raw fields.

    Examples
    --------
    >>> path = PerturbationPath.rank_one_vertical(metric, j=0)
    >>> g_t = path.evaluate(0.01)
    """

    kind: PathKind
    base_metric: InvariantMetric
    a_dot: Optional[np.ndarray] = None
    b_dot: Optional[np.ndarray] = None
    j: Optional[int] = None
    k: Optional[int] = None
    X: Optional[np.ndarray] = None
    g_dot: Optional[np.ndarray] = None

    @classmethod
    def split_rescale(
        cls, metric: InvariantMetric, a_dot: ScalarField, b_dot: ScalarField
    ) -> "PerturbationPath":
        """g_t = a_t·g_V + b_t·g_H with a_t = 1 + t·ȧ and b_t = 1 + t·ḃ."""
        return cls(
            PathKind.SPLIT_RESCALE,
            metric,
            a_dot=_scalar_field("a_dot", a_dot, metric),
            b_dot=_scalar_field("b_dot", b_dot, metric),
        )

    @classmethod
    def invariant_rescale(cls, metric: InvariantMetric, f: ScalarField) -> "PerturbationPath":
        """Split rescale with d·ȧ + (n−d−2)·ḃ = 0 and ḃ = f."""
        config = metric.config
        f = _scalar_field("f", f, metric)
        return cls.split_rescale(metric, -(config.n - config.d - 2) / config.d * f, f)

    @classmethod
    def rank_one_vertical(cls, metric: InvariantMetric, j: int) -> "PerturbationPath":
        """g_t = (1+t)·g₀ − t·n·ω_j⊗ω_j with ω_j = g₀(∂_j, ·)."""
        return cls(PathKind.RANK_ONE_VERTICAL, metric, j=_fiber_index("j", j, metric.config.d))

    @classmethod
    def mixed_vertical(cls, metric: InvariantMetric, j: int, k: int) -> "PerturbationPath":
        """g_t = g₀ − t·(ω_j⊗ω_k + ω_k⊗ω_j) for distinct fiber indices."""
        d = metric.config.d
        j, k = _fiber_index("j", j, d), _fiber_index("k", k, d)
        if j == k:
            raise ValueError(f"mixed_vertical needs distinct fiber indices, got j = k = {j}")
        return cls(PathKind.MIXED_VERTICAL, metric, j=j, k=k)

    @classmethod
    def mixed_xy(cls, metric: InvariantMetric, X, j: int) -> "PerturbationPath":
        """ġ = ξ⊗η + η⊗ξ with ξ = g₀(X^H, ·), η = g₀(∂_j, ·).

        ``X`` is a horizontal vector field on the base, shape (N, N, 2) or a
        constant 2-vector.
        """
        X = np.array(np.broadcast_to(np.asarray(X, dtype=float), metric.G.shape[:2] + (2,)))
        return cls(PathKind.MIXED_XY, metric, X=X, j=_fiber_index("j", j, metric.config.d))

    @classmethod
    def general(cls, metric: InvariantMetric, g_dot: np.ndarray) -> "PerturbationPath":
        """Arbitrary symmetric velocity in frame components."""
        N, d = metric.resolution, metric.config.d
        g_dot = np.array(g_dot, dtype=float)
        if g_dot.shape != (N, N, d + 2, d + 2):
            raise ValueError(
                f"g_dot must have shape {(N, N, d + 2, d + 2)}, got {g_dot.shape}"
            )
        if np.max(np.abs(g_dot - np.swapaxes(g_dot, -1, -2)), initial=0.0) > 1e-12 * max(
            1.0, float(np.max(np.abs(g_dot), initial=0.0))
        ):
            raise ValueError("g_dot must be symmetric at every grid point")
        return cls(PathKind.GENERAL_SYMMETRIC, metric, g_dot=0.5 * (g_dot + np.swapaxes(g_dot, -1, -2)))

    @property
    def config(self):
        return self.base_metric.config

    def velocity(self) -> np.ndarray:
        return path_velocity(self)

    def evaluate(self, t: float) -> InvariantMetric:
        return evaluate_path(self, t)

    def t_max(self, t_cap: float = 10.0) -> float:
        return admissible_range(self, t_cap=t_cap)


def _vertical_covector(M: np.ndarray, j: int) -> np.ndarray:
    return M[..., :, j]


def _outer_sym(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = np.einsum("pqa,pqb->pqab", a, b)
    return ab + np.swapaxes(ab, -1, -2)


def path_velocity(path: PerturbationPath) -> np.ndarray:
    """Velocity ġ of the path in coordinate-frame components.

    Returns
    -------
    np.ndarray
        Symmetric matrices, shape (N, N, d+2, d+2).
    """
    metric = path.base_metric
    d, n = metric.config.d, metric.config.n
    M = to_frame_components(metric)

    if path.kind is PathKind.SPLIT_RESCALE:
        horizontal = np.zeros_like(M)
        horizontal[..., d:, d:] = metric.h
        vertical = M - horizontal
        return path.a_dot[..., None, None] * vertical + path.b_dot[..., None, None] * horizontal

    if path.kind is PathKind.RANK_ONE_VERTICAL:
        omega = _vertical_covector(M, path.j)
        return M - n * np.einsum("pqa,pqb->pqab", omega, omega)

    if path.kind is PathKind.MIXED_VERTICAL:
        return -_outer_sym(_vertical_covector(M, path.j), _vertical_covector(M, path.k))

    if path.kind is PathKind.MIXED_XY:
        lift = np.concatenate(
            [-np.einsum("pqji,pqi->pqj", metric.total_connection(), path.X), path.X],
            axis=-1,
        )
        xi = np.einsum("pqab,pqb->pqa", M, lift)
        return _outer_sym(xi, _vertical_covector(M, path.j))

    if path.kind is PathKind.GENERAL_SYMMETRIC:
        return path.g_dot

    raise ValueError(f"unknown path kind {path.kind}")


def _try_evaluate(path: PerturbationPath, M0: np.ndarray, g_dot: np.ndarray, t: float):
    metric = path.base_metric
    return from_frame_components(
        metric.config,
        M0 + t * g_dot,
        spd_floor=metric.spd_floor,
        provenance={**metric.provenance, "path": path.kind.value, "t": float(t)},
    )


def evaluate_path(path: PerturbationPath, t: float) -> InvariantMetric:
    """Metric g_t = g₀ + t·ġ in split form.

    ``t == 0`` returns the base metric object itself.

    Raises
    ------
    MetricNotPositiveError
        If g_t violates the SPD floor; ``t_max`` on the error carries the
        largest admissible |t|.
    """
    if t == 0:
        return path.base_metric
    M0 = to_frame_components(path.base_metric)
    g_dot = path_velocity(path)
    try:
        return _try_evaluate(path, M0, g_dot, t)
    except MetricNotPositiveError as exc:
        t_max = admissible_range(path)
        raise MetricNotPositiveError(
            f"path {path.kind.value} leaves the SPD region at t = {t:g}; "
            f"admissible |t| < {t_max:.6g} ({exc})",
            point=exc.point,
            t_max=t_max,
        ) from exc


def admissible_range(path: PerturbationPath, t_cap: float = 10.0, iterations: int = 60) -> float:
    """Largest |t| <= t_cap with g_{±t} above the SPD floor, by bisection."""
    M0 = to_frame_components(path.base_metric)
    g_dot = path_velocity(path)

    def feasible(t: float) -> bool:
        for s in (t, -t):
            try:
                _try_evaluate(path, M0, g_dot, s)
            except MetricNotPositiveError:
                return False
        return True

    if feasible(t_cap):
        return float(t_cap)
    lo, hi = 0.0, float(t_cap)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    logger.debug("admissible range of %s path: %.6g", path.kind.value, lo)
    return lo
