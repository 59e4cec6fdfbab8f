"""
Exception types raised by bundle_spectra.

Argument problems derive from ValueError and numerical failures from
RuntimeError, so callers that only catch the built-in types keep working.
The command-line front end maps each type to an exit code.
"""

from typing import Optional, Sequence, Tuple


class BundleSpectraError(Exception):
    """Mixin shared by every error raised in this package."""


class UnsupportedConfigurationError(BundleSpectraError, ValueError):
    """The requested bundle/weight combination is not modelled."""


class MetricNotPositiveError(BundleSpectraError, ValueError):
    """A metric field fell below the positive-definiteness floor.

    Parameters
    ----------
    message : str
        Human-readable description.
    point : tuple of int, optional
        Grid index (p, q) of the first offending sample.
    t_max : float, optional
        Largest admissible |t| when the failure comes from a path.
    """

    def __init__(
        self,
        message: str,
        point: Optional[Tuple[int, int]] = None,
        t_max: Optional[float] = None
    ):
        super().__init__(message)
        self.point = point
        self.t_max = t_max


class DiscretizationError(BundleSpectraError, ValueError):
    """Grid parameters are inconsistent with the requested computation.

    ``minimal`` carries the smallest admissible value when one exists.
    """

    def __init__(self, message: str, minimal: Optional[float] = None):
        super().__init__(message)
        self.minimal = minimal


class DegenerateBranchError(BundleSpectraError, ValueError):
    """A simple-branch formula was applied to a degenerate cluster."""


class ConvergenceError(BundleSpectraError, RuntimeError):
    """The iterative eigensolver did not reach the residual tolerance."""

    def __init__(self, message: str, residuals: Sequence[float] = ()):
        super().__init__(message)
        self.residuals = list(residuals)


class ConfigError(BundleSpectraError, ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message)
        self.offset = offset
