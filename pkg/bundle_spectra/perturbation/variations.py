"""
First variations of the weight-α Laplacian along metric paths.

For a path g_t with velocity ġ the discrete form of the first variation is

    ∫(Δ̇u)v = −∫ġ(∇u, ∇v) + ∫(g(∇u, ∇v) − (Δu)v)·ν̇/ν,

evaluated on the same stencil as the operator itself so that it agrees with
a finite difference of ρ₀·ρ_t⁻¹·S_t to O(t²). Complex grid fields φ, ψ stand
for the real pair fields u = Re(e^{−iαθ}φ); pairings are reported as
Re Σ_p(...)·ψ*, which is the ρ-weighted real L² pairing up to the constant
fiber volume.
"""

import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment

from bundle_spectra.errors import DegenerateBranchError, MetricNotPositiveError
from bundle_spectra.geometry.frames import adapted_velocity, velocity_from_variations
from bundle_spectra.geometry.metric import InvariantMetric, WeightLike, as_weight
from bundle_spectra.geometry.paths import PathKind, PerturbationPath, evaluate_path
from bundle_spectra.geometry.sampling import trigonometric_basis
from bundle_spectra.operators.assembly import Stencil, assemble_weight_operator, build_stencil
from bundle_spectra.solvers.eigenpair import EigenPair
from bundle_spectra.solvers.lanczos import LanczosSolver

logger = logging.getLogger(__name__)

DEFAULT_STEPS = (1e-3, 5e-4)


@dataclass(frozen=True)
class VariationReport:
    """Analytic formula against its finite-difference oracle.

    ``rel_err`` is taken relative to max(1, |analytic|).
    """

    formula_id: str
    analytic: float
    numeric: float
    step: float
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)

    def __post_init__(self):
        abs_err = abs(self.analytic - self.numeric)
        object.__setattr__(self, "abs_err", float(abs_err))
        object.__setattr__(self, "rel_err", float(abs_err / max(1.0, abs(self.analytic))))

    def passed(self, rel_threshold: float) -> bool:
        return bool(np.isfinite(self.rel_err) and self.rel_err <= rel_threshold)

    def row(self) -> Tuple:
        return (self.formula_id, self.analytic, self.numeric, self.step, self.abs_err, self.rel_err)


REPORT_COLUMNS = ("formula_id", "analytic", "numeric", "step", "abs_err", "rel_err")


@dataclass(frozen=True, eq=False)
class VariationFields:
    """Per-node first variations induced by ġ, flattened like a Stencil."""

    volume_rate: np.ndarray
    delta_potential: np.ndarray
    delta_h_inv: np.ndarray
    dtheta_x: np.ndarray
    dtheta_y: np.ndarray


def _edge_phases(field_: np.ndarray, spacing: float) -> Tuple[np.ndarray, np.ndarray]:
    """Δ·(edge mean) of a one-form (N, N, 2) on x- and y-links."""
    dx = 0.5 * spacing * (field_[..., 0] + np.roll(field_[..., 0], -1, axis=0))
    dy = 0.5 * spacing * (field_[..., 1] + np.roll(field_[..., 1], -1, axis=1))
    return dx, dy


def variation_fields(metric: InvariantMetric, alpha: WeightLike, g_dot: np.ndarray) -> VariationFields:
    """ρ̇/ρ, δV, δ(h⁻¹) and link-phase variations for weight α."""
    weight = as_weight(alpha, metric.config.d)
    N = metric.resolution
    delta_G, delta_A, delta_h = adapted_velocity(metric, g_dot)
    G_inv, h_inv = metric.G_inverse(), metric.h_inverse()

    rate = 0.5 * (
        np.einsum("pqjk,pqkj->pq", G_inv, delta_G) + np.einsum("pqik,pqki->pq", h_inv, delta_h)
    )
    a = weight.as_array()
    G_inv_alpha = np.einsum("pqjk,k->pqj", G_inv, a)
    delta_potential = -np.einsum("pqj,pqjk,pqk->pq", G_inv_alpha, delta_G, G_inv_alpha)
    delta_h_inv = -np.einsum("pqik,pqkl,pqlm->pqim", h_inv, delta_h, h_inv)
    dtheta_x, dtheta_y = _edge_phases(np.einsum("j,pqji->pqi", a, delta_A), metric.config.spacing)
    return VariationFields(
        volume_rate=rate.ravel(),
        delta_potential=delta_potential.ravel(),
        delta_h_inv=delta_h_inv.reshape(N * N, 2, 2),
        dtheta_x=dtheta_x,
        dtheta_y=dtheta_y,
    )


def _weights_from(rho: np.ndarray, tensor: np.ndarray):
    return rho * tensor[:, 0, 0], rho * tensor[:, 0, 1], rho * tensor[:, 1, 1]


def _link_terms(stencil: Stencil, phi, psi, dtheta_x, dtheta_y) -> complex:
    weights = stencil.horizontal_weights()
    return stencil.horizontal_pairing(
        stencil.link_variation(phi, dtheta_x, dtheta_y), stencil.differences(psi), weights
    ) + stencil.horizontal_pairing(
        stencil.differences(phi), stencil.link_variation(psi, dtheta_x, dtheta_y), weights
    )


def _form(stencil: Stencil, phi, psi, scale=None) -> complex:
    """Q(φ, ψ) with ρ optionally multiplied by a node field."""
    rho = stencil.rho if scale is None else stencil.rho * scale
    vertical = np.sum(rho * stencil.potential * phi * np.conj(psi))
    horizontal = stencil.horizontal_pairing(
        stencil.differences(phi), stencil.differences(psi), stencil.horizontal_weights(scale)
    )
    return complex(vertical + horizontal)


def _split_terms(stencil: Stencil, fields: VariationFields, phi, psi) -> Tuple[complex, complex]:
    """(metric term, volume term) of the first variation, before the real part."""
    metric_term = (
        stencil.horizontal_pairing(
            stencil.differences(phi),
            stencil.differences(psi),
            _weights_from(stencil.rho, fields.delta_h_inv),
        )
        + np.sum(stencil.rho * fields.delta_potential * phi * np.conj(psi))
        + _link_terms(stencil, phi, psi, fields.dtheta_x, fields.dtheta_y)
    )
    rate = fields.volume_rate
    # Σ rate·(Sφ)ψ* = Q(φ, rate·ψ) since S is Hermitian and rate is real
    volume_term = _form(stencil, phi, psi, scale=rate) - _form(stencil, phi, rate * psi)
    return complex(metric_term), complex(volume_term)


def _flat(field_: np.ndarray, dimension: int, name: str) -> np.ndarray:
    flat = np.asarray(field_).ravel()
    if flat.size != dimension:
        raise ValueError(f"{name} must have {dimension} entries, got {flat.size}")
    return flat.astype(complex)


def laplacian_variation_pairing(
    metric: InvariantMetric,
    alpha: WeightLike,
    u: np.ndarray,
    v: np.ndarray,
    g_dot: np.ndarray,
    split: bool = False,
):
    """∫(Δ̇u)v for weight-α fields along a velocity ġ.

    Parameters
    ----------
    metric : InvariantMetric
        Base metric g₀.
    alpha : int or sequence of int
        Torus weight.
    u, v : np.ndarray
        Complex grid fields of shape (N, N) (any weight-α fields, not
        necessarily eigenfields).
    g_dot : np.ndarray
        Symmetric velocity in frame components, shape (N, N, d+2, d+2).
    split : bool, optional
        Return the pair (metric term, volume term) instead of their sum.

    Returns
    -------
    float or tuple of float
        −∫ġ(∇u, ∇v) + ∫(g(∇u, ∇v) − (Δu)v)·ν̇/ν.

    Examples
    --------
    >>> g_dot = PerturbationPath.rank_one_vertical(metric, 0).velocity()
    >>> laplacian_variation_pairing(metric, 1, phi, phi, g_dot)
    """
    stencil = build_stencil(metric, alpha)
    dimension = stencil.rho.size
    phi, psi = _flat(u, dimension, "u"), _flat(v, dimension, "v")
    metric_term, volume_term = _split_terms(stencil, variation_fields(metric, alpha, g_dot), phi, psi)
    if split:
        return float(np.real(metric_term)), float(np.real(volume_term))
    return float(np.real(metric_term + volume_term))


def lambda_dot_general(
    metric: InvariantMetric, alpha: WeightLike, pair: EigenPair, g_dot: np.ndarray
) -> float:
    """Derivative of a simple eigenvalue along ġ.

    λ̇ = [−∫ġ(∇φ, ∇φ) + ∫(|∇φ|² − λφ²)·ν̇/ν] / ∫φ².

    Raises
    ------
    DegenerateBranchError
        If ``pair`` belongs to a cluster of multiplicity > 1.
    """
    if pair.multiplicity > 1:
        raise DegenerateBranchError(
            f"eigenvalue {pair.eigenvalue:.12g} has multiplicity {pair.multiplicity}; "
            "use lambda_dot_subspace"
        )
    return float(lambda_dot_subspace(metric, alpha, [pair], g_dot)[0])


def lambda_dot_subspace(
    metric: InvariantMetric,
    alpha: WeightLike,
    pairs: Sequence[EigenPair],
    g_dot: np.ndarray,
) -> np.ndarray:
    """Branch derivatives of a degenerate cluster, ascending.

    Eigenvalues of the Hermitian matrix of the first-variation form restricted
    to the span of ``pairs``, with the cluster's mean eigenvalue in the volume
    term.
    """
    if not pairs:
        raise ValueError("pairs must contain at least one eigenpair")
    stencil = build_stencil(metric, alpha)
    fields = variation_fields(metric, alpha, g_dot)
    vectors = [pair.vector.ravel().astype(complex) for pair in pairs]
    lam = float(np.mean([pair.eigenvalue for pair in pairs]))

    size = len(vectors)
    gram = np.empty((size, size), dtype=complex)
    form = np.empty((size, size), dtype=complex)
    for a, psi in enumerate(vectors):
        for b, phi in enumerate(vectors):
            gram[a, b] = np.sum(stencil.rho * phi * np.conj(psi))
            metric_term = _split_terms(stencil, fields, phi, psi)[0]
            rate_term = _form(stencil, phi, psi, scale=fields.volume_rate) - lam * np.sum(
                stencil.rho * fields.volume_rate * phi * np.conj(psi)
            )
            form[a, b] = metric_term + rate_term
    form = 0.5 * (form + form.conj().T)
    gram = 0.5 * (gram + gram.conj().T)
    if not stencil.is_complex:
        form, gram = form.real, gram.real
    return np.sort(eigh(form, gram, eigvals_only=True))


def split_rescale_pairing(
    metric: InvariantMetric,
    alpha: WeightLike,
    u: np.ndarray,
    v: np.ndarray,
    a_dot,
    b_dot,
) -> float:
    """∫(Δ̇u)v along g_t = a_t·g_V + b_t·g_H from the three-integral formula.

    With j = d and k = 2,

        2∫(Δ̇u)v = −∫(jȧ + kḃ)(Δu)v + ∫((j−2)ȧ + kḃ)⟨∇_V u, ∇_V v⟩
                   + ∫(jȧ + (k−2)ḃ)⟨∇_H u, ∇_H v⟩;

    half of the right-hand side is returned.
    """
    stencil = build_stencil(metric, alpha)
    dimension = stencil.rho.size
    phi, psi = _flat(u, dimension, "u"), _flat(v, dimension, "v")
    shape = metric.G.shape[:2]
    a_dot = np.broadcast_to(np.asarray(a_dot, dtype=float), shape).ravel()
    b_dot = np.broadcast_to(np.asarray(b_dot, dtype=float), shape).ravel()
    j, k = metric.config.d, 2

    laplacian = _form(stencil, phi, (j * a_dot + k * b_dot) * psi)
    vertical = np.sum(stencil.rho * ((j - 2) * a_dot + k * b_dot) * stencil.potential * phi * np.conj(psi))
    horizontal = stencil.horizontal_pairing(
        stencil.differences(phi),
        stencil.differences(psi),
        stencil.horizontal_weights(j * a_dot + (k - 2) * b_dot),
    )
    return float(np.real(-laplacian + vertical + horizontal)) / 2.0


def invariant_rescale_pairing(
    metric: InvariantMetric, alpha: WeightLike, u: np.ndarray, v: np.ndarray, f
) -> float:
    """∫(Δ̇u)v = −∫f(Δu)v + (n−2)/d·∫f⟨∇_V u, ∇_V v⟩ for the invariant rescaling."""
    config = metric.config
    stencil = build_stencil(metric, alpha)
    dimension = stencil.rho.size
    phi, psi = _flat(u, dimension, "u"), _flat(v, dimension, "v")
    f = np.broadcast_to(np.asarray(f, dtype=float), metric.G.shape[:2]).ravel()
    laplacian = _form(stencil, phi, f * psi)
    vertical = np.sum(stencil.rho * f * stencil.potential * phi * np.conj(psi))
    return float(np.real(-laplacian + (config.n - 2) / config.d * vertical))


def mixed_xy_pairing(
    metric: InvariantMetric, alpha: WeightLike, u: np.ndarray, v: np.ndarray, X, j: int
) -> float:
    """∫(Δ̇u)v = −∫((Xu)(Yv) + (Yu)(Xv)) with Y = ∂_j, along the mixed XY path.

    On the grid Y acts on transported values as −iα_j and X weights each
    link by the edge mean of h·X.
    """
    weight = as_weight(alpha, metric.config.d)
    if not 0 <= j < weight.d:
        raise ValueError(f"j must be a fiber index in [0, {weight.d - 1}], got {j}")
    stencil = build_stencil(metric, weight)
    dimension = stencil.rho.size
    phi, psi = _flat(u, dimension, "u"), _flat(v, dimension, "v")
    X = np.broadcast_to(np.asarray(X, dtype=float), metric.G.shape[:2] + (2,))
    hX = np.einsum("pqik,pqk->pqi", metric.h, X)
    dtheta_x, dtheta_y = _edge_phases(weight.alpha[j] * hX, metric.config.spacing)
    return float(np.real(_link_terms(stencil, phi, psi, dtheta_x, dtheta_y)))


def pairing_finite_difference(
    path: PerturbationPath, alpha: WeightLike, u: np.ndarray, v: np.ndarray, step: float = 1e-4
) -> float:
    """Central difference of Re Σ ρ₀·(Δ_t u)·v* along ``path``."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    base = path.base_metric
    rho0 = base.volume_density().ravel()
    dimension = rho0.size
    phi, psi = _flat(u, dimension, "u"), _flat(v, dimension, "v")

    def pairing(t: float) -> float:
        metric_t = evaluate_path(path, t)
        op = assemble_weight_operator(metric_t, alpha)
        scale = rho0 / metric_t.volume_density().ravel()
        return float(np.real(np.vdot(psi, scale * (op.stiffness @ phi))))

    return (pairing(step) - pairing(-step)) / (2.0 * step)


class UhlenbeckCheck(NamedTuple):
    """Pairing identity check along invariant rescalings.

    ``lhs`` holds the finite-difference pairings, ``rhs_stated`` the
    prediction with b = (n+2)/d·V, ``rhs_refit`` the prediction with the
    least-squares constant ``c_fit``.
    """

    lhs: np.ndarray
    rhs_stated: np.ndarray
    rhs_refit: np.ndarray
    c_fit: float
    c_spread: float
    c_derived: float
    max_abs_mismatch_stated: float
    max_abs_mismatch_refit: float


def uhlenbeck_pairing_check(
    metric: InvariantMetric,
    alpha: WeightLike,
    lam: float,
    u: np.ndarray,
    v: np.ndarray,
    fs: Sequence,
    step: float = 1e-4,
) -> UhlenbeckCheck:
    """Compare ∫(Δ̇u)v with 2∫f·uv·(c·V − λ) over a batch of rescalings f.

    The constant c is fitted by least squares over the batch; ``c_spread``
    is the standard deviation of the per-f constants. For an eigenfield the
    derived value (n−2)/d is reported alongside.
    """
    config = metric.config
    if len(fs) == 0:
        raise ValueError("fs must contain at least one rescaling field")
    rho = metric.volume_density().ravel() * config.spacing**2
    V = metric.potential(alpha).ravel()
    phi, psi = _flat(u, rho.size, "u"), _flat(v, rho.size, "v")
    product = phi * np.conj(psi)

    lhs, P, R = [], [], []
    for f in fs:
        f = np.broadcast_to(np.asarray(f, dtype=float), metric.G.shape[:2])
        path = PerturbationPath.invariant_rescale(metric, f)
        lhs.append(pairing_finite_difference(path, alpha, phi, psi, step))
        P.append(float(np.real(np.sum(rho * f.ravel() * V * product))))
        R.append(float(np.real(np.sum(rho * f.ravel() * product))))
    lhs, P, R = np.array(lhs), np.array(P), np.array(R)

    b_factor = (config.n + 2) / config.d
    rhs_stated = 2.0 * (b_factor * P - lam * R)
    scale = max(1.0, float(np.max(np.abs(P), initial=0.0)))
    if np.sum(P**2) <= (1e-14 * scale) ** 2:
        c_fit, c_spread = float("nan"), float("nan")
        rhs_refit = np.full_like(lhs, np.nan)
    else:
        c_fit = float(np.sum(P * (lhs + 2.0 * lam * R)) / (2.0 * np.sum(P**2)))
        usable = np.abs(P) > 1e-12 * scale
        per_f = (lhs[usable] + 2.0 * lam * R[usable]) / (2.0 * P[usable])
        c_spread = float(np.std(per_f))
        rhs_refit = 2.0 * (c_fit * P - lam * R)
    return UhlenbeckCheck(
        lhs=lhs,
        rhs_stated=rhs_stated,
        rhs_refit=rhs_refit,
        c_fit=c_fit,
        c_spread=c_spread,
        c_derived=(config.n - 2) / config.d,
        max_abs_mismatch_stated=float(np.max(np.abs(lhs - rhs_stated))),
        max_abs_mismatch_refit=float(np.max(np.abs(lhs - rhs_refit))),
    )


class BranchDerivative(NamedTuple):
    value: float
    estimates: Tuple[float, ...]
    cluster_derivatives: Tuple[float, ...]
    cluster_size: int


def _overlaps(rho: np.ndarray, left: Sequence[EigenPair], right: Sequence[EigenPair]) -> np.ndarray:
    L = np.stack([p.vector.ravel() for p in left])
    R = np.stack([p.vector.ravel() for p in right])
    return np.abs(np.conj(L) @ (rho[:, None] * R.T))


def _cluster_members(pairs: Sequence[EigenPair], index: int) -> List[EigenPair]:
    target = pairs[index]
    return [p for p in pairs if p.cluster_id == target.cluster_id]


def _base_cluster(solver: LanczosSolver, op, index: int, m: int) -> Tuple[List[EigenPair], List[EigenPair], int]:
    """Base eigenpairs with ``m`` grown until the cluster of ``index`` is complete."""
    if not 0 <= index < op.dimension - 1:
        raise ValueError(f"index must lie in [0, {op.dimension - 2}], got {index}")
    m = min(max(m, index + 2), op.dimension - 1)
    pairs = solver.solve(op, m)
    members = _cluster_members(pairs, index)
    while members[-1].index == m - 1 and m + 4 < op.dimension:
        m += 4
        pairs = solver.solve(op, m)
        members = _cluster_members(pairs, index)
    return pairs, members, m


def _tracked(pairs_t: Sequence[EigenPair], members: Sequence[EigenPair], rho0: np.ndarray) -> List[EigenPair]:
    """The len(members) pairs at time t spanning the base cluster best."""
    weight = np.sum(_overlaps(rho0, pairs_t, members) ** 2, axis=1)
    chosen = np.sort(np.argsort(-weight)[: len(members)])
    return [pairs_t[i] for i in chosen]


def eigenvalue_branch_derivative(
    path: PerturbationPath,
    alpha: WeightLike,
    index: int,
    steps: Sequence[float] = DEFAULT_STEPS,
    match_overlap: bool = False,
    m: Optional[int] = None,
    solver: Optional[LanczosSolver] = None,
) -> BranchDerivative:
    """Finite-difference derivative of eigenvalue number ``index`` along a path.

    Central differences at two steps h₁ > h₂ are combined by Richardson
    extrapolation, (r²·D(h₂) − D(h₁)) / (r² − 1) with r = h₁/h₂. Eigenpairs at
    ±t are tracked by ρ₀-overlap with the base eigenfield.

    Parameters
    ----------
    path : PerturbationPath
        Path through the base metric.
    alpha : int or sequence of int
        Torus weight.
    index : int
        Position of the branch in the ascending base spectrum.
    steps : sequence of float, optional
        One or two step sizes; a single step skips the extrapolation.
    match_overlap : bool, optional
        Resolve degenerate clusters by matching the ±t eigenvectors with an
        assignment on their overlaps. Without it a degenerate cluster raises.
    m : int, optional
        Number of eigenpairs computed per metric. Defaults to index + 4.

    Raises
    ------
    DegenerateBranchError
        If the branch is degenerate and ``match_overlap`` is false.
    """
    steps = tuple(float(s) for s in steps)
    if not 1 <= len(steps) <= 2 or min(steps) <= 0:
        raise ValueError(f"steps must be one or two positive numbers, got {steps}")
    solver = solver or LanczosSolver(tol=1e-11)
    base = path.base_metric
    rho0 = (base.volume_density() * base.config.spacing**2).ravel()
    pairs0, members, m = _base_cluster(solver, assemble_weight_operator(base, alpha), index, m or index + 4)
    if len(members) > 1 and not match_overlap:
        raise DegenerateBranchError(
            f"eigenvalue {index} ({pairs0[index].eigenvalue:.12g}) lies in a cluster of size "
            f"{len(members)}; pass match_overlap=True"
        )
    position = index - members[0].index

    def branch_slopes(t: float) -> np.ndarray:
        plus = _tracked(solver.solve(assemble_weight_operator(evaluate_path(path, t), alpha), m), members, rho0)
        minus = _tracked(solver.solve(assemble_weight_operator(evaluate_path(path, -t), alpha), m), members, rho0)
        rows, cols = linear_sum_assignment(-_overlaps(rho0, plus, minus))
        return np.sort(
            [(plus[a].eigenvalue - minus[b].eigenvalue) / (2.0 * t) for a, b in zip(rows, cols)]
        )

    estimates = [branch_slopes(t) for t in steps]
    if len(estimates) == 2:
        r2 = (steps[0] / steps[1]) ** 2
        slopes = (r2 * estimates[1] - estimates[0]) / (r2 - 1.0)
    else:
        slopes = estimates[0]
    logger.debug(
        "branch %d along %s: slopes %s (steps %s)", index, path.kind.value, slopes, steps
    )
    return BranchDerivative(
        value=float(slopes[position]),
        estimates=tuple(float(e[position]) for e in estimates),
        cluster_derivatives=tuple(float(s) for s in slopes),
        cluster_size=len(members),
    )


def _smooth_field(rng: np.random.Generator, basis: np.ndarray, amplitude: float) -> np.ndarray:
    if basis.shape[0] == 0:
        return np.zeros(basis.shape[1:])
    coefficients = rng.normal(scale=amplitude, size=basis.shape[0]) / np.sqrt(basis.shape[0])
    return np.tensordot(coefficients, basis, axes=1)


def random_velocity(
    metric: InvariantMetric, seed: int = 0, amplitude: float = 0.1, modes: int = 1
) -> np.ndarray:
    """Smooth random symmetric velocity with periodic (δG, δA, δh)."""
    rng = np.random.default_rng(seed)
    d = metric.config.d
    basis = trigonometric_basis(metric.config, modes)
    N = metric.resolution

    def symmetric(size: int) -> np.ndarray:
        out = np.zeros((N, N, size, size))
        for a in range(size):
            for b in range(a, size):
                out[..., a, b] = out[..., b, a] = amplitude + _smooth_field(rng, basis, amplitude)
        return out

    delta_G = symmetric(d)
    delta_A = np.stack(
        [np.stack([_smooth_field(rng, basis, amplitude) for _ in range(2)], axis=-1) for _ in range(d)],
        axis=-2,
    )
    delta_h = symmetric(2)
    return velocity_from_variations(metric, delta_G, delta_A, delta_h)


def random_fields(metric: InvariantMetric, seed: int = 0, count: int = 2) -> List[np.ndarray]:
    """Complex Gaussian grid fields for pairing checks."""
    rng = np.random.default_rng(seed)
    shape = metric.G.shape[:2]
    return [rng.normal(size=shape) + 1j * rng.normal(size=shape) for _ in range(count)]


def _battery_paths(
    metric: InvariantMetric, rng: np.random.Generator, zero_velocity: bool
) -> List[Tuple[str, PerturbationPath]]:
    d = metric.config.d
    basis = trigonometric_basis(metric.config, 1)
    if zero_velocity:
        zeros = np.zeros(metric.G.shape[:2] + (d + 2, d + 2))
        return [
            ("general_symmetric", PerturbationPath.general(metric, zeros)),
            ("split_rescale", PerturbationPath.split_rescale(metric, 0.0, 0.0)),
            ("mixed_xy", PerturbationPath.mixed_xy(metric, np.zeros(2), 0)),
        ]
    f = 1.0 + _smooth_field(rng, basis, 0.3)
    X = np.stack([_smooth_field(rng, basis, 0.3) + 0.2 for _ in range(2)], axis=-1)
    paths = [
        ("split_rescale", PerturbationPath.split_rescale(
            metric, 0.5 + _smooth_field(rng, basis, 0.3), _smooth_field(rng, basis, 0.3))),
        ("invariant_rescale", PerturbationPath.invariant_rescale(metric, f)),
        ("mixed_xy", PerturbationPath.mixed_xy(metric, X, 0)),
        ("general_symmetric", PerturbationPath.general(
            metric, random_velocity(metric, seed=int(rng.integers(2**31)))))
    ]
    paths.extend(
        (f"rank_one_vertical_{j}", PerturbationPath.rank_one_vertical(metric, j)) for j in range(d)
    )
    if d >= 2:
        paths.append(("mixed_vertical_0_1", PerturbationPath.mixed_vertical(metric, 0, 1)))
    return paths


def variation_battery(
    metric: InvariantMetric,
    alpha: WeightLike,
    index: int = 0,
    steps: Sequence[float] = DEFAULT_STEPS,
    seed: int = 0,
    pair_step: float = 1e-4,
    match_overlap: bool = False,
    zero_velocity: bool = False,
    solver: Optional[LanczosSolver] = None,
) -> List[VariationReport]:
    """Every analytic variation formula against its finite-difference oracle.

    Eigenvalue rows compare λ̇ with :func:`eigenvalue_branch_derivative` for
    each path kind; pairing rows compare the first-variation formulas with
    :func:`pairing_finite_difference` on random fields. ``zero_velocity``
    runs the battery on paths with ġ = 0, where every row must vanish.
    """
    solver = solver or LanczosSolver(tol=1e-11)
    rng = np.random.default_rng(seed)
    weight = as_weight(alpha, metric.config.d)
    _, members, _ = _base_cluster(solver, assemble_weight_operator(metric, weight), index, index + 4)
    if len(members) > 1 and not match_overlap:
        raise DegenerateBranchError(
            f"eigenvalue {index} of weight {weight} lies in a cluster of size {len(members)}"
        )
    position = index - members[0].index
    u, v = random_fields(metric, seed=int(rng.integers(2**31)))

    reports = []
    for name, path in _battery_paths(metric, rng, zero_velocity):
        g_dot = path.velocity()
        try:
            numeric = eigenvalue_branch_derivative(
                path, weight, index, steps, match_overlap=match_overlap, solver=solver
            )
        except MetricNotPositiveError as exc:
            logger.warning("skipping %s: %s", name, exc)
            continue
        if len(members) == 1:
            analytic = lambda_dot_general(metric, weight, members[0], g_dot)
        else:
            analytic = float(lambda_dot_subspace(metric, weight, members, g_dot)[position])
        reports.append(VariationReport(f"eigenvalue:{name}", analytic, numeric.value, min(steps)))

        fd = pairing_finite_difference(path, weight, u, v, pair_step)
        reports.append(VariationReport(
            f"pairing:{name}", laplacian_variation_pairing(metric, weight, u, v, g_dot), fd, pair_step
        ))
        if path.kind is PathKind.SPLIT_RESCALE:
            if name == "invariant_rescale":
                analytic = invariant_rescale_pairing(metric, weight, u, v, path.b_dot)
            else:
                analytic = split_rescale_pairing(metric, weight, u, v, path.a_dot, path.b_dot)
            reports.append(VariationReport(f"formula:{name}", analytic, fd, pair_step))
        elif path.kind is PathKind.MIXED_XY:
            analytic = mixed_xy_pairing(metric, weight, u, v, path.X, path.j)
            reports.append(VariationReport(f"formula:{name}", analytic, fd, pair_step))
    logger.info(
        "variation battery: %d rows, worst relative error %.3e",
        len(reports), max((r.rel_err for r in reports), default=0.0),
    )
    return reports
