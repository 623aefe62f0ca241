"""panelsight: camera-based digitization of analog factory-floor artifacts."""

__version__ = "0.1.0"
