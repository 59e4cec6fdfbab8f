"""Bundle configurations, invariant metrics and perturbation paths."""

from bundle_spectra.geometry.metric import (
    DEFAULT_SPD_FLOOR,
    TWO_PI,
    BundleConfig,
    InvariantMetric,
    Weight,
    as_weight,
    background_connection,
    flat_metric,
    min_eigenvalue_field,
)
from bundle_spectra.geometry.frames import (
    adapted_velocity,
    from_frame_components,
    to_frame_components,
    velocity_from_variations,
    volume_rate,
)
from bundle_spectra.geometry.sampling import sample_random_metric, trigonometric_basis
from bundle_spectra.geometry.storage import (
    load_metric,
    metric_from_dict,
    metric_from_json,
    metric_to_dict,
    metric_to_json,
    save_metric,
)
from bundle_spectra.geometry.paths import (
    PathKind,
    PerturbationPath,
    admissible_range,
    evaluate_path,
    path_velocity,
)
from bundle_spectra.geometry.presets import (
    PRESETS,
    base_mode_symbol,
    get_preset,
    get_preset_info,
    list_presets,
)

__all__ = [
    "DEFAULT_SPD_FLOOR",
    "TWO_PI",
    "BundleConfig",
    "InvariantMetric",
    "Weight",
    "as_weight",
    "background_connection",
    "flat_metric",
    "min_eigenvalue_field",
    "adapted_velocity",
    "from_frame_components",
    "to_frame_components",
    "velocity_from_variations",
    "volume_rate",
    "sample_random_metric",
    "trigonometric_basis",
    "load_metric",
    "metric_from_dict",
    "metric_from_json",
    "metric_to_dict",
    "metric_to_json",
    "save_metric",
    "PathKind",
    "PerturbationPath",
    "admissible_range",
    "evaluate_path",
    "path_velocity",
    "PRESETS",
    "base_mode_symbol",
    "get_preset",
    "get_preset_info",
    "list_presets",
]
