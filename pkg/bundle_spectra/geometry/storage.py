"""
JSON serialization of invariant metrics.

Floats are written by the json module's shortest round-trip representation,
so loading a saved metric reproduces every field bit for bit.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from bundle_spectra.geometry.metric import BundleConfig, InvariantMetric


FORMAT_VERSION = 1


def metric_to_dict(metric: InvariantMetric) -> Dict[str, Any]:
    """Plain-Python representation of a metric (row-major nested lists)."""
    return {
        "format": FORMAT_VERSION,
        "config": metric.config.to_dict(),
        "G": metric.G.tolist(),
        "A": metric.A.tolist(),
        "h": metric.h.tolist(),
        "spd_floor": float(metric.spd_floor),
        "provenance": metric.provenance,
    }


def metric_from_dict(data: Dict[str, Any]) -> InvariantMetric:
    """Rebuild a metric from :func:`metric_to_dict` output."""
    missing = {"config", "G", "A", "h"} - set(data)
    if missing:
        raise ValueError(f"metric document is missing keys: {sorted(missing)}")
    version = data.get("format", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported metric format {version}, expected {FORMAT_VERSION}")
    kwargs = {}
    if "spd_floor" in data:
        kwargs["spd_floor"] = float(data["spd_floor"])
    return InvariantMetric(
        config=BundleConfig(**data["config"]),
        G=np.asarray(data["G"], dtype=float),
        A=np.asarray(data["A"], dtype=float),
        h=np.asarray(data["h"], dtype=float),
        provenance=dict(data.get("provenance", {})),
        **kwargs,
    )


def metric_to_json(metric: InvariantMetric) -> str:
    return json.dumps(metric_to_dict(metric), sort_keys=True)


def metric_from_json(text: str) -> InvariantMetric:
    return metric_from_dict(json.loads(text))


def save_metric(metric: InvariantMetric, path: Union[str, Path]) -> Path:
    """Write ``metric`` as UTF-8 JSON and return the path."""
    path = Path(path)
    path.write_text(metric_to_json(metric), encoding="utf-8")
    return path


def load_metric(path: Union[str, Path]) -> InvariantMetric:
    return metric_from_json(Path(path).read_text(encoding="utf-8"))
