"""
Lowest eigenpairs of weight operators.

The generalized problem Sφ = λρφ is reduced to the Hermitian standard problem
for B = ρ^{-1/2}·S·ρ^{-1/2}. Small problems go to a dense solver; larger ones
to Lanczos with full reorthogonalization and deflated restarts: every run is
started orthogonally to the eigenvectors locked so far, and the solver stops
once a fresh run finds nothing below the m-th locked eigenvalue. Exactly
degenerate eigenvalues are therefore found with their full multiplicity.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from bundle_spectra.errors import ConvergenceError
from bundle_spectra.operators.assembly import WeightOperator
from bundle_spectra.solvers.eigenpair import EigenPair, assign_clusters, eigen_residual

logger = logging.getLogger(__name__)


def _project_out(vector: np.ndarray, basis: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return vector
    for _ in range(2):
        vector = vector - basis @ (basis.conj().T @ vector)
    return vector


def _normalize_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry of each column real and positive."""
    out = vectors.copy()
    for i in range(out.shape[1]):
        column = out[:, i]
        pivot = column[np.argmax(np.abs(column))]
        out[:, i] = column * (np.conj(pivot) / np.abs(pivot))
    return out


class LanczosSolver:
    """Lowest-eigenpair solver for weight operators.

    Parameters
    ----------
    tol : float, optional
        Residual tolerance, relative to max(1, |λ|). Default is 1e-8.
    max_iter : int, optional
        Maximum Lanczos steps per run. Default is 600.
    seed : int, optional
        Seed of the starting vectors. Default is 0.
    dense_limit : int, optional
        Problems with at most this dimension are solved densely.
    cluster_tol : float, optional
        Relative gap below which eigenvalues form one cluster.
    method : {'auto', 'dense', 'lanczos'}, optional
        Force one of the two paths.
    max_restarts : int, optional
        Maximum number of deflated runs. Defaults to 4·m + 10.

    Examples
    --------
    >>> solver = LanczosSolver(tol=1e-10)
    >>> pairs = solver.solve(op, m=5)
    >>> [p.eigenvalue for p in pairs]
    """

    def __init__(
        self,
        tol: float = 1e-8,
        max_iter: int = 600,
        seed: int = 0,
        dense_limit: int = 2500,
        cluster_tol: float = 1e-8,
        method: str = "auto",
        max_restarts: Optional[int] = None,
    ):
        if tol <= 0:
            raise ValueError(f"tol must be positive, got {tol}")
        if max_iter < 2:
            raise ValueError(f"max_iter must be at least 2, got {max_iter}")
        if method not in ("auto", "dense", "lanczos"):
            raise ValueError(f"method must be 'auto', 'dense' or 'lanczos', got {method!r}")
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed
        self.dense_limit = dense_limit
        self.cluster_tol = cluster_tol
        self.method = method
        self.max_restarts = max_restarts

    def _converged(self, theta: float, estimate: float) -> bool:
        return estimate <= self.tol * max(1.0, abs(theta))

    def _run(self, B, wanted: int, locked: np.ndarray, rng: np.random.Generator, dtype):
        """One Lanczos run in the orthogonal complement of ``locked``."""
        n = B.shape[0]
        steps = min(self.max_iter, n - locked.shape[1])
        q = rng.standard_normal(n)
        if np.issubdtype(dtype, np.complexfloating):
            q = q + 1j * rng.standard_normal(n)
        q = _project_out(q.astype(dtype), locked)
        q = q / np.linalg.norm(q)

        Q = np.zeros((n, steps), dtype=dtype)
        alphas: List[float] = []
        betas: List[float] = []
        theta = np.array([])
        ritz = np.zeros((0, 0))
        estimates = np.array([])
        for k in range(steps):
            Q[:, k] = q
            w = B @ q
            a = float(np.real(np.vdot(q, w)))
            w = w - a * q
            if k > 0:
                w = w - betas[-1] * Q[:, k - 1]
            w = _project_out(w, Q[:, : k + 1])
            w = _project_out(w, locked)
            b = float(np.linalg.norm(w))
            alphas.append(a)

            exhausted = k + 1 == steps
            breakdown = b <= 1e-12 * max(1.0, max(abs(x) for x in alphas))
            if exhausted or breakdown or (k + 1 >= max(wanted, 2) and (k + 1) % 5 == 0):
                if len(alphas) == 1:
                    theta, ritz = np.array(alphas), np.ones((1, 1))
                else:
                    theta, ritz = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
                estimates = b * np.abs(ritz[-1, :]) if not breakdown else np.zeros(theta.size)
                count = min(wanted, theta.size)
                if all(self._converged(theta[i], estimates[i]) for i in range(count)):
                    break
                if exhausted or breakdown:
                    break
            betas.append(b)
            q = w / b
        vectors = Q[:, : len(alphas)] @ ritz
        return theta, vectors, estimates

    def lanczos_lowest(self, B, m: int) -> Tuple[np.ndarray, np.ndarray]:
        """Lowest ``m`` eigenpairs of a Hermitian matrix by deflated Lanczos.

        ``B`` may be any sparse or dense Hermitian matrix supporting ``@``.

        Raises
        ------
        ConvergenceError
            If a run ends without a converged Ritz pair or the restart budget
            is spent.
        """
        n = B.shape[0]
        if not 1 <= m < n:
            raise ValueError(f"m must satisfy 1 <= m < dimension ({n}), got {m}")
        dtype = np.complex128 if np.issubdtype(B.dtype, np.complexfloating) else np.float64
        rng = np.random.default_rng(self.seed)
        values: List[float] = []
        locked = np.zeros((n, 0), dtype=dtype)
        restarts = self.max_restarts if self.max_restarts is not None else 4 * m + 10

        for run in range(restarts):
            if locked.shape[1] >= n:
                break
            wanted = max(m - len(values), 1)
            theta, vectors, estimates = self._run(B, wanted, locked, rng, dtype)
            converged = []
            for i in range(theta.size):
                if not self._converged(theta[i], estimates[i]):
                    break
                converged.append(i)
            if not converged:
                raise ConvergenceError(
                    f"Lanczos run {run} found no converged Ritz pair within "
                    f"{self.max_iter} steps (tol {self.tol:g})",
                    residuals=list(estimates[:wanted]),
                )

            threshold = np.sort(values)[m - 1] if len(values) >= m else np.inf
            margin = self.tol * max(1.0, abs(threshold)) if np.isfinite(threshold) else 0.0
            fresh = [i for i in converged if theta[i] < threshold - margin]
            logger.debug(
                "Lanczos run %d: %d converged, %d below threshold %.6g",
                run, len(converged), len(fresh), threshold,
            )
            if not fresh:
                break
            for i in fresh:
                vector = _project_out(vectors[:, i], locked)
                vector = vector / np.linalg.norm(vector)
                locked = np.column_stack([locked, vector])
                values.append(float(theta[i]))
        else:
            raise ConvergenceError(
                f"Lanczos needed more than {restarts} deflated runs for m = {m}",
                residuals=[],
            )

        order = np.argsort(values, kind="stable")[:m]
        return np.asarray(values)[order], locked[:, order]

    def dense_lowest(self, B, m: int) -> Tuple[np.ndarray, np.ndarray]:
        matrix = B.toarray() if hasattr(B, "toarray") else np.asarray(B)
        n = matrix.shape[0]
        if not 1 <= m <= n:
            raise ValueError(f"m must satisfy 1 <= m <= dimension ({n}), got {m}")
        return scipy.linalg.eigh(matrix, subset_by_index=[0, m - 1])

    def _rayleigh_ritz(self, B, values: np.ndarray, vectors: np.ndarray):
        """Rotate each cluster to the eigenbasis of B restricted to its span."""
        ids = assign_clusters(values, self.cluster_tol)
        values = values.copy()
        vectors = vectors.copy()
        for cid in np.unique(ids):
            members = np.flatnonzero(ids == cid)
            if members.size < 2:
                continue
            basis, _ = np.linalg.qr(vectors[:, members])
            projected = basis.conj().T @ (B @ basis)
            local_values, local_vectors = np.linalg.eigh(0.5 * (projected + projected.conj().T))
            values[members] = local_values
            vectors[:, members] = basis @ local_vectors
        return values, vectors

    def solve(self, op: WeightOperator, m: int) -> List[EigenPair]:
        """Lowest ``m`` eigenpairs of ``op``, ascending.

        Multiplicities refer to clusters among the returned pairs; a cluster
        cut by ``m`` reports only its returned members.
        """
        if not 1 <= m < op.dimension:
            raise ValueError(f"m must satisfy 1 <= m < dimension ({op.dimension}), got {m}")
        B = op.symmetrized()
        use_dense = self.method == "dense" or (
            self.method == "auto" and op.dimension <= self.dense_limit
        )
        if use_dense:
            values, vectors = self.dense_lowest(B, m)
        else:
            values, vectors = self.lanczos_lowest(B, m)
            values, vectors = self._rayleigh_ritz(B, values, vectors)
        vectors = _normalize_phase(vectors)

        N = op.config.resolution
        ids = assign_clusters(values, self.cluster_tol)
        sizes = np.bincount(ids)
        fields = vectors / np.sqrt(op.mass)[:, None]
        pairs = []
        for i in range(m):
            phi = fields[:, i]
            residual = eigen_residual(op, float(values[i]), phi)
            if residual > 10 * self.tol * max(1.0, abs(values[i])):
                logger.warning(
                    "eigenpair %d of weight %s has residual %.3e above tolerance",
                    i, op.weight, residual,
                )
            pairs.append(
                EigenPair(
                    eigenvalue=float(values[i]),
                    vector=phi.reshape(N, N),
                    residual=residual,
                    cluster_id=int(ids[i]),
                    weight=op.weight,
                    multiplicity=int(sizes[ids[i]]),
                    index=i,
                )
            )
        logger.debug("weight %s: lowest eigenvalues %s", op.weight, values[: min(m, 4)])
        return pairs


def lowest_eigenpairs(
    op: WeightOperator,
    m: int,
    tol: float = 1e-8,
    seed: int = 0,
    **options,
) -> List[EigenPair]:
    """Lowest ``m`` eigenpairs of ``op`` (see :class:`LanczosSolver`)."""
    return LanczosSolver(tol=tol, seed=seed, **options).solve(op, m)


def dense_eigenpairs(op: WeightOperator, m: int, **options) -> List[EigenPair]:
    """Dense-solver oracle for :func:`lowest_eigenpairs`."""
    return LanczosSolver(method="dense", **options).solve(op, m)
