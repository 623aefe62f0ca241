"""Template- and color-based discrete state readers: toggle, safety light."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..imaging import Box, ImageBuffer, match_template_ssd
from .types import Reading, ReadingKind, reading

LIGHT_COLORS = ("red", "yellow", "green")


def read_toggle(
    roi: ImageBuffer, state_templates: list[tuple[str, ImageBuffer]]
) -> Reading:
    """Lowest-SSD state template wins; confidence from the margin to the
    runner-up."""
    if len(state_templates) < 2:
        raise ConfigError(["toggle requires at least two state templates"])
    sizes = {(t.width, t.height, t.channels) for _, t in state_templates}
    if len(sizes) != 1:
        raise ConfigError(["toggle state templates must share one size"])

    scored = []
    for label, tmpl in state_templates:
        res, _ = match_template_ssd(roi, tmpl)
        scored.append((res.normalized_score, label))
    # stable sort: ties resolve to the first template in declaration order
    order = sorted(range(len(scored)), key=lambda i: scored[i][0])
    best, second = scored[order[0]], scored[order[1]]
    if second[0] <= 0:
        confidence = 0.0  # runner-up also perfect: undecidable margin
    else:
        confidence = max(0.0, min(1.0, 1.0 - best[0] / second[0]))
    return reading(ReadingKind.TOGGLE, best[1], confidence)


@dataclass(frozen=True)
class LightZone:
    color: str
    box: Box

    def __post_init__(self):
        if self.color not in LIGHT_COLORS:
            raise ConfigError([f"unknown light color {self.color!r}"])


def _dominant_matches(color: str, r: float, g: float, b: float) -> bool:
    if color == "red":
        return r > 1.2 * g and r > 1.2 * b
    if color == "green":
        return g > 1.2 * r and g > 1.2 * b
    # yellow: red and green both dominate blue and are close to each other
    return r > 1.2 * b and g > 1.2 * b and abs(r - g) < 0.25 * max(r, g)


def read_safety_light(
    roi: ImageBuffer, zones: list[LightZone], lit_threshold: float = 120.0
) -> Reading:
    """Zone is lit when bright enough and its dominant channel matches its
    color; exactly one lit zone names the state."""
    if roi.channels != 3:
        raise ConfigError(["safety light reader requires an RGB ROI"])
    full = Box(0, 0, roi.width, roi.height)
    lit = []
    for zone in zones:
        if not full.contains(zone.box):
            raise ConfigError([f"light zone {zone.color} outside the ROI"])
        patch = roi.data[zone.box.y : zone.box.y2, zone.box.x : zone.box.x2]
        mean = patch.reshape(-1, 3).mean(axis=0)
        intensity = float(mean.mean())
        if intensity >= lit_threshold and _dominant_matches(zone.color, *mean):
            lit.append(zone.color)
    if len(lit) == 1:
        return reading(ReadingKind.SAFETY_LIGHT, lit[0], 1.0)
    if len(lit) == 0:
        return reading(ReadingKind.SAFETY_LIGHT, "off", 1.0)
    return reading(
        ReadingKind.SAFETY_LIGHT, "multiple", 1.0, detail={"lit": lit}
    )
