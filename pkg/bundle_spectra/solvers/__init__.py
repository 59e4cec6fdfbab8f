"""Eigensolvers and spectral bookkeeping for weight operators."""

from bundle_spectra.solvers.eigenpair import (
    ClusterInfo,
    EigenPair,
    assign_clusters,
    cluster_multiplicities,
    eigen_residual,
    realified_operator,
    realified_residual,
    realify,
    write_eigenpairs_csv,
)
from bundle_spectra.solvers.lanczos import LanczosSolver, dense_eigenpairs, lowest_eigenpairs
from bundle_spectra.solvers.spectra import (
    Collision,
    collisions_from_spectra,
    cross_weight_collisions,
    weight_spectra,
)

__all__ = [
    "ClusterInfo",
    "EigenPair",
    "assign_clusters",
    "cluster_multiplicities",
    "eigen_residual",
    "realified_operator",
    "realified_residual",
    "realify",
    "write_eigenpairs_csv",
    "LanczosSolver",
    "dense_eigenpairs",
    "lowest_eigenpairs",
    "Collision",
    "collisions_from_spectra",
    "cross_weight_collisions",
    "weight_spectra",
]
