"""
Coordinate-triplet text export of assembled operators.

The triplet file has one line ``row col re im`` per stored entry (sorted by
row, then column) with 17 significant digits. A JSON header next to it
records N, α, e and the SHA-256 checksum of the triplet text.
"""

import hashlib
import json
from pathlib import Path
from typing import Dict, Union

import numpy as np

from bundle_spectra.operators.assembly import WeightOperator


def triplet_lines(op: WeightOperator) -> str:
    """Render the stiffness matrix as triplet text."""
    coo = op.stiffness.tocoo()
    order = np.lexsort((coo.col, coo.row))
    values = np.asarray(coo.data, dtype=complex)[order]
    lines = [
        "%d %d %.17g %.17g" % (r, c, v.real, v.imag)
        for r, c, v in zip(coo.row[order], coo.col[order], values)
    ]
    return "\n".join(lines) + "\n"


def triplet_checksum(op: WeightOperator) -> str:
    return hashlib.sha256(triplet_lines(op).encode("utf-8")).hexdigest()


def export_triplets(op: WeightOperator, path: Union[str, Path]) -> Dict[str, object]:
    """Write ``path`` (triplets) and ``path`` + ``.json`` (header).

    Returns
    -------
    dict
        The header that was written.
    """
    path = Path(path)
    text = triplet_lines(op)
    path.write_text(text, encoding="utf-8")
    header = {
        "N": op.config.resolution,
        "alpha": list(op.alpha),
        "euler": op.config.euler,
        "nnz": int(op.stiffness.nnz),
        "checksum": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "mass": ["%.17g" % m for m in op.mass],
    }
    Path(str(path) + ".json").write_text(json.dumps(header, sort_keys=True), encoding="utf-8")
    return header
