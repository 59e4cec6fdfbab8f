"""
Eigenpair containers, multiplicity clustering and real reconstruction.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from bundle_spectra.geometry.metric import Weight
from bundle_spectra.io import emit, render_csv
from bundle_spectra.operators.assembly import WeightOperator


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One eigenpair of a weight operator.

    Attributes
    ----------
    eigenvalue : float
        λ, ascending across a solver result.
    vector : np.ndarray
        Eigenfield φ on the base grid, shape (N, N), with ⟨φ, φ⟩_ρ = 1.
    residual : float
        ‖Sφ − λρφ‖ / ‖ρφ‖ recomputed from the returned data.
    cluster_id : int
        Pairs within cluster_tol·max(1, λ) of each other share an id.
    weight : Weight
        Torus weight of the operator.
    multiplicity : int
        Complex multiplicity of the cluster this pair belongs to.
    index : int
        Position in the ascending list.
    """

    eigenvalue: float
    vector: np.ndarray
    residual: float
    cluster_id: int
    weight: Weight
    multiplicity: int = 1
    index: int = 0

    @property
    def real_dimension(self) -> int:
        return self.multiplicity if self.weight.is_zero else 2 * self.multiplicity


class ClusterInfo(NamedTuple):
    lambda_mean: float
    complex_multiplicity: int
    real_dimension: int


def assign_clusters(eigenvalues: Sequence[float], cluster_tol: float) -> np.ndarray:
    """Greedy gap clustering of sorted eigenvalues; returns cluster ids."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    ids = np.zeros(eigenvalues.size, dtype=int)
    for i in range(1, eigenvalues.size):
        gap = eigenvalues[i] - eigenvalues[i - 1]
        same = gap <= cluster_tol * max(1.0, abs(eigenvalues[i - 1]))
        ids[i] = ids[i - 1] if same else ids[i - 1] + 1
    return ids


def cluster_multiplicities(pairs: Sequence[EigenPair], cluster_tol: float = 1e-8) -> List[ClusterInfo]:
    """Group sorted eigenpairs into clusters.

    Returns
    -------
    list of ClusterInfo
        (mean eigenvalue, complex multiplicity, real dimension) per cluster;
        the real dimension doubles for α ≠ 0.

    Examples
    --------
    Eigenvalues [1.0, 1.0 + 1e-12, 2.0] at weight 1 with tol 1e-9 give
    clusters (1.0, 2, 4) and (2.0, 1, 2).
    """
    if not pairs:
        return []
    values = [p.eigenvalue for p in pairs]
    if np.any(np.diff(values) < 0):
        raise ValueError("pairs must be sorted by eigenvalue")
    ids = assign_clusters(values, cluster_tol)
    factor = 1 if pairs[0].weight.is_zero else 2
    clusters = []
    for cid in range(ids[-1] + 1):
        members = np.asarray(values)[ids == cid]
        clusters.append(ClusterInfo(float(np.mean(members)), int(members.size), factor * int(members.size)))
    return clusters


def eigen_residual(op: WeightOperator, eigenvalue: float, vector: np.ndarray) -> float:
    """‖Sφ − λρφ‖ / ‖ρφ‖."""
    phi = np.asarray(vector).reshape(op.dimension)
    weighted = op.mass * phi
    return float(np.linalg.norm(op.stiffness @ phi - eigenvalue * weighted) / np.linalg.norm(weighted))


def realified_operator(op: WeightOperator) -> Tuple[sp.csr_matrix, np.ndarray]:
    """Real form of the pencil acting on stacked (Re φ, Im φ)."""
    S = op.stiffness
    re = sp.csr_matrix(S.real) if np.iscomplexobj(S.data) else S
    im = sp.csr_matrix(S.imag) if np.iscomplexobj(S.data) else sp.csr_matrix(S.shape)
    block = sp.bmat([[re, -im], [im, re]], format="csr")
    return block, np.concatenate([op.mass, op.mass])


def realify(pair: EigenPair) -> Tuple[np.ndarray, np.ndarray]:
    """Real pair u = (u₁, u₂) and its rotated partner u* = (−u₂, u₁).

    u₁ = Re φ and u₂ = Im φ are the components of the weight-α field on the
    slice θ = 0. Each result has shape (2, N, N).
    """
    phi = np.asarray(pair.vector)
    u = np.stack([phi.real, phi.imag])
    u_star = np.stack([-phi.imag, phi.real])
    return u, u_star


def realified_residual(op: WeightOperator, pair: EigenPair) -> float:
    """Largest residual of u and u* under the realified operator."""
    block, mass = realified_operator(op)
    worst = 0.0
    for field_ in realify(pair):
        vec = field_.reshape(-1)
        weighted = mass * vec
        residual = np.linalg.norm(block @ vec - pair.eigenvalue * weighted) / np.linalg.norm(weighted)
        worst = max(worst, float(residual))
    return worst


EIGENPAIR_COLUMNS = ("index", "lambda", "residual", "cluster_id")


def write_eigenpairs_csv(
    pairs: Sequence[EigenPair],
    path: Optional[Union[str, Path]] = None,
    timestamp: bool = False,
    dump_fields: bool = False,
) -> str:
    """Render ``pairs`` as CSV; write to ``path`` when given.

    With ``dump_fields`` the eigenfields are saved next to ``path`` as
    ``<stem>_fields.npy`` (shape (m, N, N)).
    """
    rows = [(p.index, p.eigenvalue, p.residual, p.cluster_id) for p in pairs]
    text = render_csv(EIGENPAIR_COLUMNS, rows, timestamp=timestamp)
    if path is not None:
        path = Path(path)
        emit(text, path=path)
        if dump_fields and pairs:
            np.save(path.with_name(path.stem + "_fields.npy"), np.stack([p.vector for p in pairs]))
    return text
