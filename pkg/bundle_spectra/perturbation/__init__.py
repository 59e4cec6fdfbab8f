"""First-variation formulas and their finite-difference oracles."""

from bundle_spectra.perturbation.variations import (
    DEFAULT_STEPS,
    REPORT_COLUMNS,
    BranchDerivative,
    UhlenbeckCheck,
    VariationFields,
    VariationReport,
    eigenvalue_branch_derivative,
    invariant_rescale_pairing,
    lambda_dot_general,
    lambda_dot_subspace,
    laplacian_variation_pairing,
    mixed_xy_pairing,
    pairing_finite_difference,
    random_fields,
    random_velocity,
    split_rescale_pairing,
    uhlenbeck_pairing_check,
    variation_battery,
    variation_fields,
)

__all__ = [
    "DEFAULT_STEPS",
    "REPORT_COLUMNS",
    "BranchDerivative",
    "UhlenbeckCheck",
    "VariationFields",
    "VariationReport",
    "eigenvalue_branch_derivative",
    "invariant_rescale_pairing",
    "lambda_dot_general",
    "lambda_dot_subspace",
    "laplacian_variation_pairing",
    "mixed_xy_pairing",
    "pairing_finite_difference",
    "random_fields",
    "random_velocity",
    "split_rescale_pairing",
    "uhlenbeck_pairing_check",
    "variation_battery",
    "variation_fields",
]
