"""
Named constant-metric scenarios.

Each preset fixes the bundle topology and a constant metric. They back the
analytic oracles of the test suite and the ``preset`` key of the CLI config.
"""

from typing import Any, Dict

import numpy as np

from bundle_spectra.geometry.metric import BundleConfig, InvariantMetric, flat_metric


# Each entry holds d, euler and constant G/h. "calibrate_base" rescales h so
# that the first discrete base mode has eigenvalue exactly 1 on the grid.
PRESETS: Dict[str, Dict[str, Any]] = {
    "flat": {
        "description": "Trivial circle bundle, flat identity metric",
        "d": 1,
        "euler": 0,
        "G": [[1.0]],
        "h": [[1.0, 0.0], [0.0, 1.0]],
    },
    "flat_g3": {
        "description": "Trivial circle bundle, G=[3]; weight 1 and 2 collide at 4/3",
        "d": 1,
        "euler": 0,
        "G": [[3.0]],
        "h": [[1.0, 0.0], [0.0, 1.0]],
        "calibrate_base": True,
    },
    "landau_e1": {
        "description": "Circle bundle with Euler number 1, flat metric",
        "d": 1,
        "euler": 1,
        "G": [[1.0]],
        "h": [[1.0, 0.0], [0.0, 1.0]],
    },
    "landau_e2": {
        "description": "Circle bundle with Euler number 2, flat metric",
        "d": 1,
        "euler": 2,
        "G": [[1.0]],
        "h": [[1.0, 0.0], [0.0, 1.0]],
    },
    "flat_t4": {
        "description": "Trivial T^2 bundle (4-torus), flat identity metric",
        "d": 2,
        "euler": 0,
        "G": [[1.0, 0.0], [0.0, 1.0]],
        "h": [[1.0, 0.0], [0.0, 1.0]],
    },
    "diagonal": {
        "description": "Trivial circle bundle, G=[2], h=diag(1.5, 0.75)",
        "d": 1,
        "euler": 0,
        "G": [[2.0]],
        "h": [[1.5, 0.0], [0.0, 0.75]],
    },
}


def _normalize(name: str) -> str:
    return name.lower().replace("-", "_").replace(" ", "_")


def base_mode_symbol(resolution: int, k: int = 1) -> float:
    """Discrete symbol (2 − 2cos kΔ)/Δ² of the second difference."""
    delta = 2.0 * np.pi / resolution
    return (2.0 - 2.0 * np.cos(k * delta)) / delta**2


def list_presets() -> Dict[str, str]:
    """Map preset names to their descriptions.

    Examples
    --------
    >>> for name, desc in list_presets().items():
    ...     print(f"{name}: {desc}")
    """
    return {name: entry["description"] for name, entry in PRESETS.items()}


def get_preset_info(name: str) -> Dict[str, Any]:
    """Copy of the raw preset entry."""
    key = _normalize(name)
    if key not in PRESETS:
        available = ", ".join(PRESETS.keys())
        raise ValueError(f"Unknown preset '{name}'. Available presets: {available}")
    return dict(PRESETS[key])


def get_preset(name: str, resolution: int = 32) -> InvariantMetric:
    """Build the constant metric of a named preset.

    Parameters
    ----------
    name : str
        Preset name, e.g. ``'flat'`` or ``'landau_e2'``. Case, dashes and
        spaces are normalized.
    resolution : int, optional
        Grid points per base coordinate. Default is 32.

    Raises
    ------
    ValueError
        If the preset name is not recognized.

    Examples
    --------
    >>> metric = get_preset("flat_g3", resolution=32)
    >>> metric.potential(2)[0, 0]
    1.3333333333333333
    """
    entry = get_preset_info(name)
    config = BundleConfig(d=entry["d"], euler=entry["euler"], resolution=resolution)
    h = np.asarray(entry["h"], dtype=float)
    if entry.get("calibrate_base", False):
        h = h * base_mode_symbol(resolution)
    return flat_metric(
        config,
        G=entry["G"],
        h=h,
        provenance={"kind": "preset", "preset": _normalize(name)},
    )
