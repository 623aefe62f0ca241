"""Shared exception types."""


class PanelSightError(Exception):
    """Base for all package errors."""


class ImagingError(PanelSightError, ValueError):
    """Invalid input to an image-processing primitive."""


class GeometryError(ImagingError):
    """Degenerate geometry (collinear points, singular homography)."""


class ConfigError(PanelSightError, ValueError):
    """Invalid artifact/station configuration.

    ``errors`` carries every problem found, not just the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SpecError(PanelSightError, ValueError):
    """Invalid mock-panel spec (overlap, out-of-range state)."""
