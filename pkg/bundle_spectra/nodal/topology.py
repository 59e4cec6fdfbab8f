"""
Nodal domains, nodal-set components and zero diagnostics.

Cells whose value is below ``zero_tol·RMS`` in magnitude are neutral: they
belong to no nodal domain and are part of the nodal set. Nodal domains are
the components of same-sign cells under 6-neighbour adjacency. The nodal
set is represented by its sign-change edges and neutral cells; elements
lying on a common grid plaquette are connected.
"""

import json
import logging
from collections import deque
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from bundle_spectra.geometry.metric import TWO_PI
from bundle_spectra.io import render_json
from bundle_spectra.nodal.total_space import TotalSpaceField, wrap_consistency_residual
from bundle_spectra.operators.assembly import WeightOperator, plaquette_fluxes

logger = logging.getLogger(__name__)

DEFAULT_ZERO_TOL = 1e-7

PLANES = ((0, 1), (0, 2), (1, 2))


class DisjointSet:
    """Union-find over ``n`` integer elements with union by size."""

    def __init__(self, n: int):
        self.sizes = np.ones(n, dtype=np.int64)
        self.parents = np.arange(n)
        self.components = n

    def find(self, index: int) -> int:
        parents = self.parents
        root = index
        while root != parents[root]:
            root = parents[root]
        while index != root:
            parents[index], index = root, parents[index]
        return int(root)

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self.sizes[a] < self.sizes[b]:
            a, b = b, a
        self.parents[b] = a
        self.sizes[a] += self.sizes[b]
        self.components -= 1
        return True

    def union_pairs(self, left: np.ndarray, right: np.ndarray) -> None:
        for a, b in zip(left.tolist(), right.tolist()):
            self.union(a, b)

    def roots(self) -> np.ndarray:
        """Root of every element after full path compression."""
        parents = self.parents
        compressed = parents[parents]
        while np.any(compressed != parents):
            parents = compressed
            compressed = parents[parents]
        self.parents = parents
        return parents


def sign_array(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """−1, 0 or +1 per cell; 0 marks neutral cells."""
    if zero_tol < 0:
        raise ValueError(f"zero_tol must be non-negative, got {zero_tol}")
    threshold = zero_tol * field.rms()
    values = field.values
    signs = np.sign(values).astype(np.int8)
    signs[np.abs(values) <= threshold] = 0
    return signs


def domain_edges(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flat signs and the (a, b) cell pairs joining equal nonzero signs."""
    signs = sign_array(field, zero_tol).ravel()
    cells = np.arange(field.size)
    left, right = [], []
    for axis in range(3):
        neighbor = field.neighbor_index(axis).ravel()
        keep = (signs != 0) & (signs == signs[neighbor])
        left.append(cells[keep])
        right.append(neighbor[keep])
    return signs, np.concatenate(left), np.concatenate(right)


def _count_roots(signs: np.ndarray, roots: np.ndarray) -> int:
    return int(np.unique(roots[signs != 0]).size)


def count_nodal_domains(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Number of connected same-sign regions, positive and negative counted separately.

    Examples
    --------
    >>> field = reconstruct_total_space(np.ones((8, 8)), 1, 0, 16)
    >>> count_nodal_domains(field)
    2
    """
    signs, left, right = domain_edges(field, zero_tol)
    components = DisjointSet(field.size)
    components.union_pairs(left, right)
    return _count_roots(signs, components.roots())


def domain_labels(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Component label per cell (−1 on neutral cells), labels 0..k−1."""
    signs, left, right = domain_edges(field, zero_tol)
    components = DisjointSet(field.size)
    components.union_pairs(left, right)
    roots = components.roots()
    labels = np.full(field.size, -1)
    active = signs != 0
    _, labels[active] = np.unique(roots[active], return_inverse=True)
    return labels.reshape(field.shape)


def count_nodal_domains_bfs(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Breadth-first-search oracle for :func:`count_nodal_domains`."""
    signs = sign_array(field, zero_tol)
    seen = np.zeros(field.shape, dtype=bool)
    count = 0
    for start in zip(*np.nonzero(signs)):
        if seen[start]:
            continue
        count += 1
        sign = signs[start]
        seen[start] = True
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            for axis in range(3):
                for step in (1, -1):
                    other = field.neighbor(cell, axis, step)
                    if not seen[other] and signs[other] == sign:
                        seen[other] = True
                        queue.append(other)
    return count


def count_nodal_domains_csgraph(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Sparse-graph oracle for :func:`count_nodal_domains`."""
    signs, left, right = domain_edges(field, zero_tol)
    graph = sp.coo_matrix(
        (np.ones(left.size), (left, right)), shape=(field.size, field.size)
    ).tocsr()
    _, labels = connected_components(graph, directed=False)
    return int(np.unique(labels[signs != 0]).size)


def _nodal_elements(field: TotalSpaceField, signs: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Membership mask over element ids and the neighbour maps used to build it.

    Element ids: axis·C + cell for the sign-change edge leaving ``cell``
    along ``axis``, 3·C + cell for a neutral cell.
    """
    C = field.size
    neighbors = [field.neighbor_index(axis).ravel() for axis in range(3)]
    active = np.zeros(4 * C, dtype=bool)
    for axis in range(3):
        active[axis * C:(axis + 1) * C] = signs * signs[neighbors[axis]] < 0
    active[3 * C:] = signs == 0
    return active, neighbors


def _plaquette_groups(field: TotalSpaceField, neighbors: List[np.ndarray]) -> List[np.ndarray]:
    """Element ids touching each plaquette, one (count, C) array per plane."""
    C = field.size
    cells = np.arange(C)
    groups = []
    for a, b in PLANES:
        nb_a, nb_b = neighbors[a], neighbors[b]
        ids = [
            a * C + cells,
            b * C + cells,
            b * C + nb_a,
            a * C + nb_b,
            3 * C + cells,
            3 * C + nb_a,
            3 * C + nb_b,
            # both corners, since the twist does not commute with y-steps on the seam
            3 * C + nb_b[nb_a],
            3 * C + nb_a[nb_b],
        ]
        groups.append(np.stack(ids))
    return groups


def _nodal_union(field: TotalSpaceField, zero_tol: float) -> Tuple[np.ndarray, DisjointSet]:
    signs = sign_array(field, zero_tol).ravel()
    active, neighbors = _nodal_elements(field, signs)
    components = DisjointSet(active.size)
    for group in _plaquette_groups(field, neighbors):
        mask = active[group]
        for column in np.nonzero(mask.sum(axis=0) >= 2)[0]:
            members = group[mask[:, column], column]
            for other in members[1:].tolist():
                components.union(int(members[0]), other)
    return active, components


def nodal_set_components(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> int:
    """Number of connected components of the nodal set.

    Examples
    --------
    >>> field = reconstruct_total_space(np.ones((8, 8)), 1, 0, 16)
    >>> nodal_set_components(field)
    2
    """
    active, components = _nodal_union(field, zero_tol)
    if not np.any(active):
        return 0
    roots = components.roots()
    return int(np.unique(roots[active]).size)


def regular_value_margin(field: TotalSpaceField, zero_tol: float = DEFAULT_ZERO_TOL) -> float:
    """Smallest gradient norm on the nodal set, divided by RMS(field).

    On a sign-change edge the gradient is interpolated linearly to the zero
    crossing; neutral cells use their own gradient. ``inf`` without a nodal
    set.
    """
    signs = sign_array(field, zero_tol).ravel()
    active, neighbors = _nodal_elements(field, signs)
    if not np.any(active):
        return float("inf")
    C = field.size
    values = field.values.ravel()
    gradient = field.gradient().reshape(C, 3)

    candidates = []
    for axis in range(3):
        edge = active[axis * C:(axis + 1) * C]
        start = np.nonzero(edge)[0]
        end = neighbors[axis][start]
        t = values[start] / (values[start] - values[end])
        interpolated = (1.0 - t)[:, None] * gradient[start] + t[:, None] * gradient[end]
        candidates.append(np.linalg.norm(interpolated, axis=1))
    neutral = np.nonzero(active[3 * C:])[0]
    candidates.append(np.linalg.norm(gradient[neutral], axis=1))
    margin = float(np.min(np.concatenate(candidates)))
    return margin / field.rms()


def vortex_charges(op: WeightOperator, phi: np.ndarray) -> np.ndarray:
    """Integer index of φ's zeros on each plaquette.

    Entry [p, q] belongs to the plaquette with lower-left corner (p, q).
    The charge is (Φ − Σw)/2π with Φ the plaquette flux and w the covariant
    phase increment arg(φ̄_a·U·φ_b) along each counter-clockwise edge, so it
    is gauge invariant. The charges sum to α·e.
    """
    phi = np.asarray(phi, dtype=complex)
    N = op.config.resolution
    if phi.shape != (N, N):
        raise ValueError(f"phi must have shape {(N, N)}, got {phi.shape}")
    ux, uy = op.links_x, op.links_y
    wx = np.angle(np.conj(phi) * ux * np.roll(phi, -1, axis=0))
    wy = np.angle(np.conj(phi) * uy * np.roll(phi, -1, axis=1))
    circulation = wx + np.roll(wy, -1, axis=0) - np.roll(wx, -1, axis=1) - wy
    return np.rint((plaquette_fluxes(op) - circulation) / TWO_PI).astype(int)


def euler_number(op: WeightOperator, phi: np.ndarray) -> int:
    """Total vortex charge of φ, the Euler number α·e of its bundle."""
    return int(np.sum(vortex_charges(op, phi)))


def _segment_distance(start: complex, end: complex) -> float:
    """Distance from 0 to the segment [start, end] in the complex plane."""
    direction = end - start
    length = abs(direction) ** 2
    if length == 0.0:
        return abs(start)
    t = min(max(-(start * np.conj(direction)).real / length, 0.0), 1.0)
    return abs(start + t * direction)


def bilinear_minimum(a: complex, b: complex, c: complex, d: complex) -> float:
    """Minimum of |f| over the unit square for a bilinear complex f.

    ``a``, ``b``, ``c``, ``d`` are the values at (0, 0), (1, 0), (1, 1) and
    (0, 1). Returns 0.0 when f has a zero in the closed square, otherwise
    the smallest |f| on the square's boundary.
    """
    # f(s, t) = P(t) + s·Q(t) with P = a + (d − a)t, Q = (b − a) + (a − b + c − d)t
    p0, p1 = a, d - a
    q0, q1 = b - a, a - b + c - d
    # f vanishes iff P/Q is real and −P/Q ∈ [0, 1]
    coeffs = [
        (p1 * np.conj(q1)).imag,
        (p0 * np.conj(q1) + p1 * np.conj(q0)).imag,
        (p0 * np.conj(q0)).imag,
    ]
    if np.any(coeffs):
        candidates = np.roots(coeffs)
    else:
        candidates = np.linspace(0.0, 1.0, 5)
    for t in np.atleast_1d(candidates):
        if abs(t.imag) > 1e-12 or not -1e-12 <= t.real <= 1.0 + 1e-12:
            continue
        t = float(np.clip(t.real, 0.0, 1.0))
        P, Q = p0 + p1 * t, q0 + q1 * t
        if abs(Q) == 0.0:
            if abs(P) == 0.0:
                return 0.0
            continue
        s = -(P * np.conj(Q)).real / abs(Q) ** 2
        if -1e-12 <= s <= 1.0 + 1e-12:
            return 0.0
    return min(
        _segment_distance(a, b), _segment_distance(b, c),
        _segment_distance(c, d), _segment_distance(d, a),
    )


def vanish_on_orbit(phi: np.ndarray, op: Optional[WeightOperator] = None) -> float:
    """min |φ| / RMS(|φ|) over the base.

    Without ``op`` the minimum is taken over grid nodes. With ``op`` every
    plaquette carrying a nonzero vortex charge is examined as well: its
    corners are transported to the lower-left node along the links and
    |φ| is minimised over the bilinear interpolant. A charged plaquette
    contains a zero of that interpolant, so the result is 0.0 whenever
    α·e ≠ 0 and the grid resolves the zeros.
    """
    phi = np.asarray(phi, dtype=complex)
    magnitude = np.abs(phi)
    rms = float(np.sqrt(np.mean(magnitude**2)))
    if rms == 0.0:
        return 0.0
    smallest = float(np.min(magnitude))
    if op is None:
        return smallest / rms

    ux, uy = op.links_x, op.links_y
    charges = vortex_charges(op, phi)
    east = ux * np.roll(phi, -1, axis=0)
    north = uy * np.roll(phi, -1, axis=1)
    corner = ux * np.roll(uy, -1, axis=0) * np.roll(np.roll(phi, -1, axis=0), -1, axis=1)
    for p, q in zip(*np.nonzero(charges)):
        value = bilinear_minimum(phi[p, q], east[p, q], corner[p, q], north[p, q])
        smallest = min(smallest, value)
        if smallest == 0.0:
            break
    logger.debug("%d charged plaquettes, min |phi| %.3g", np.count_nonzero(charges), smallest)
    return smallest / rms


@dataclass(frozen=True)
class NodalReport:
    """Nodal diagnostics of one eigenfield.

    ``companion_*`` fields repeat the counts for u₂. ``wrap_residual`` and
    ``euler_number`` are ``None`` when no operator was supplied.
    """

    domain_count: int
    nodal_components: int
    regular_margin: float
    min_orbit_norm: float
    companion_domain_count: Optional[int] = None
    companion_components: Optional[int] = None
    wrap_residual: Optional[float] = None
    euler_number: Optional[int] = None
    resolution: int = 0
    n_theta: int = 0
    alpha: int = 0
    euler: int = 0
    zero_tol: float = DEFAULT_ZERO_TOL

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    def to_json(self) -> str:
        return render_json(self.to_dict())


def nodal_report(
    field: TotalSpaceField,
    phi: np.ndarray,
    op: Optional[WeightOperator] = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> NodalReport:
    """All nodal diagnostics of ``field`` (reconstructed from ``phi``)."""
    companion_domains = companion_components = None
    if field.companion is not None:
        partner = field.swapped()
        companion_domains = count_nodal_domains(partner, zero_tol)
        companion_components = nodal_set_components(partner, zero_tol)
    wrap_residual = charge = None
    if op is not None:
        wrap_residual = wrap_consistency_residual(field, phi, op)
        charge = euler_number(op, phi)
    report = NodalReport(
        domain_count=count_nodal_domains(field, zero_tol),
        nodal_components=nodal_set_components(field, zero_tol),
        regular_margin=regular_value_margin(field, zero_tol),
        min_orbit_norm=vanish_on_orbit(phi, op),
        companion_domain_count=companion_domains,
        companion_components=companion_components,
        wrap_residual=wrap_residual,
        euler_number=charge,
        resolution=field.resolution,
        n_theta=field.n_theta,
        alpha=field.alpha,
        euler=field.euler,
        zero_tol=zero_tol,
    )
    logger.info(
        "nodal report: %d domains, %d nodal components, margin %.3g",
        report.domain_count, report.nodal_components, report.regular_margin,
    )
    return report


def dump_sign_array(
    field: TotalSpaceField, path: Union[str, Path], zero_tol: float = DEFAULT_ZERO_TOL
) -> Dict[str, object]:
    """Write packed sign bits to ``path`` and a JSON header to ``path`` + ``.json``.

    The binary holds ``np.packbits`` of the C-ordered positive mask followed
    by the negative mask.
    """
    path = Path(path)
    signs = sign_array(field, zero_tol).ravel()
    positive = np.packbits(signs > 0)
    negative = np.packbits(signs < 0)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(positive.tobytes() + negative.tobytes())
    header = {
        "shape": list(field.shape),
        "order": "C",
        "planes": ["positive", "negative"],
        "plane_bytes": int(positive.size),
        "bitorder": "big",
        "alpha": field.alpha,
        "euler": field.euler,
        "zero_tol": zero_tol,
        "identifications": {
            "x": "(N-1, q, r) -> (0, q, r + e*q*n_theta/N mod n_theta)",
            "y": "periodic",
            "theta": "periodic",
        },
    }
    Path(str(path) + ".json").write_text(json.dumps(header, sort_keys=True), encoding="utf-8")
    return header
