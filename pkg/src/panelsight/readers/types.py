"""Reading record and calibration types shared by all readers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum

from ..errors import ConfigError
from ..imaging import Point2


class ReadingKind(str, Enum):
    CIRCULAR_GAUGE = "circular_gauge"
    LINEAR_GAUGE = "linear_gauge"
    SEVEN_SEGMENT = "seven_segment"
    GLYPH_TEXT = "glyph_text"
    KNOB = "knob"
    TOGGLE = "toggle"
    SAFETY_LIGHT = "safety_light"
    LIQUID_LEVEL = "liquid_level"
    FIXTURE_STATE = "fixture_state"
    PART_QUALITY = "part_quality"


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Reading:
    """One digitized observation of one artifact.

    ``value`` is None for a declared not-found outcome (confidence 0).
    ``detail`` carries reader-specific extras (e.g. per-fixture states) and
    is not part of the wire serialization.
    """

    artifact_id: str
    kind: ReadingKind
    value: float | str | None
    units: str
    timestamp: datetime
    confidence: float
    station_id: str = ""
    detail: dict | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0,1], got {self.confidence}")
        if isinstance(self.value, float) and not math.isfinite(self.value):
            raise ValueError(f"numeric reading must be finite, got {self.value}")

    @property
    def found(self) -> bool:
        return self.value is not None

    def stamped(self, artifact_id: str, units: str, timestamp: datetime, station_id: str = "") -> "Reading":
        return replace(
            self,
            artifact_id=artifact_id,
            units=units,
            timestamp=timestamp,
            station_id=station_id,
        )


def reading(kind: ReadingKind, value, confidence: float, detail: dict | None = None) -> Reading:
    """Reader-side constructor; identity fields are stamped by the pipeline."""
    return Reading(
        artifact_id="",
        kind=kind,
        value=value,
        units="",
        timestamp=_utcnow(),
        confidence=confidence,
        detail=detail,
    )


def not_found(kind: ReadingKind, detail: dict | None = None) -> Reading:
    return reading(kind, None, 0.0, detail)


@dataclass(frozen=True)
class GaugeCalibration:
    """Two-point needle-to-scale mapping.

    ``x_min``/``x_max`` are needle readings (radians for circular gauges,
    pixel coordinates for linear ones) at the scale minimum and maximum;
    ``y_min``/``y_max`` are the corresponding scale values. ``direction=-1``
    reflects the mapping about the scale midpoint.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    pivot: Point2 | None = None
    axis: str | None = None  # "horizontal" | "vertical", linear gauges only
    direction: int = 1

    def __post_init__(self):
        errors = []
        if self.x_min == self.x_max:
            errors.append("x_min and x_max must differ")
        if not self.y_min < self.y_max:
            errors.append("y_min must be < y_max")
        if self.direction not in (1, -1):
            errors.append(f"direction must be +1 or -1, got {self.direction}")
        if self.axis not in (None, "horizontal", "vertical"):
            errors.append(f"axis must be horizontal or vertical, got {self.axis!r}")
        if errors:
            raise ConfigError(errors)

    @property
    def span(self) -> float:
        return self.y_max - self.y_min


def map_needle_to_scale(x: float, cal: GaugeCalibration) -> float:
    """Two-point linear interpolation hitting both anchors, clamped to the
    scale range."""
    frac = (x - cal.x_min) / (cal.x_max - cal.x_min)
    if cal.direction == -1:
        frac = 1.0 - frac
    y = cal.y_min + frac * (cal.y_max - cal.y_min)
    return min(max(y, cal.y_min), cal.y_max)


@dataclass(frozen=True)
class PreprocessParams:
    """Shared segmentation pipeline knobs: gray -> blur -> threshold."""

    blur_kernel: int = 5
    blur_sigma: float = 1.5
    threshold: int = 100
    invert: bool = True  # dark needle on a light face

    def __post_init__(self):
        if self.blur_kernel % 2 == 0 or self.blur_kernel < 1:
            raise ConfigError([f"blur kernel must be odd, got {self.blur_kernel}"])
        if not 0 <= self.threshold <= 255:
            raise ConfigError([f"threshold must be in [0,255], got {self.threshold}"])


@dataclass(frozen=True)
class HoughParams:
    rho_res: float = 1.0
    theta_res: float = math.radians(1.0)
    vote_threshold: int = 15
    pivot_radius: float = 8.0
