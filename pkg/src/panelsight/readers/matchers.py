"""SSD-matching readers: liquid level, fixture alignment, part quality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..imaging import (
    BINARY,
    BINARY_INVERTED,
    Box,
    ImageBuffer,
    match_template_ssd,
    threshold,
    to_grayscale,
)
from .types import Reading, ReadingKind, not_found, reading


def read_liquid_level(
    roi: ImageBuffer,
    surface_template: ImageBuffer,
    zero_reference: int,
    scale: float,
    search_column: Box,
    reject_score: float = 0.15,
) -> Reading:
    """Track the liquid surface band by SSD inside a vertical search column.

    Level = (zero_reference - matched_row) * scale, in artifact units.
    """
    res, _ = match_template_ssd(roi, surface_template, search_column)
    if res.normalized_score > reject_score:
        return not_found(
            ReadingKind.LIQUID_LEVEL, detail={"score": res.normalized_score}
        )
    level = (zero_reference - res.top_left.y) * scale
    confidence = max(0.0, min(1.0, 1.0 - res.normalized_score))
    return reading(ReadingKind.LIQUID_LEVEL, level, confidence)


@dataclass(frozen=True)
class FixtureSpec:
    fixture_id: str
    expected: Box  # nominal fixture placement in frame coordinates
    template: ImageBuffer  # captured in the properly aligned pose


def read_fixture_state(
    frame: ImageBuffer,
    fixtures: list[FixtureSpec],
    misalign_score: float = 0.02,
    search_margin: float = 0.25,
    center_tolerance: float = 4.0,
) -> Reading:
    """Each fixture is matched inside its inflated expected box; it counts as
    aligned only if the match is both clean and close to the nominal center."""
    states = {}
    worst = 0.0
    for fx in fixtures:
        area = _inflate(fx.expected, search_margin, frame.width, frame.height)
        if fx.template.width > area.w or fx.template.height > area.h:
            raise ConfigError(
                [f"fixture {fx.fixture_id}: template larger than its search area"]
            )
        res, _ = match_template_ssd(frame, fx.template, area)
        mcx = res.top_left.x + fx.template.width / 2.0
        mcy = res.top_left.y + fx.template.height / 2.0
        ecx, ecy = fx.expected.center()
        offset = max(abs(mcx - ecx), abs(mcy - ecy))
        aligned = res.normalized_score <= misalign_score and offset <= center_tolerance
        states[fx.fixture_id] = "aligned" if aligned else "misaligned"
        worst = max(worst, res.normalized_score)
    overall = "ok" if all(v == "aligned" for v in states.values()) else "fault"
    confidence = max(0.0, min(1.0, 1.0 - worst)) if fixtures else 1.0
    return reading(ReadingKind.FIXTURE_STATE, overall, confidence, detail={"fixtures": states})


def _inflate(box: Box, margin: float, width: int, height: int) -> Box:
    dx = int(round(box.w * margin))
    dy = int(round(box.h * margin))
    x0 = max(0, box.x - dx)
    y0 = max(0, box.y - dy)
    x1 = min(width, box.x2 + dx)
    y1 = min(height, box.y2 + dy)
    return Box(x0, y0, x1 - x0, y1 - y0)


def read_part_quality(
    roi: ImageBuffer,
    good_template: ImageBuffer,
    reject_score: float = 0.01,
    presence_threshold: float = 0.02,
    presence_binarize: int = 128,
    presence_invert: bool = True,
) -> Reading:
    """no_part below the presence gate; otherwise good iff the best SSD against
    the good-part template stays under the reject score."""
    gray = to_grayscale(roi) if roi.channels == 3 else roi
    mode = BINARY_INVERTED if presence_invert else BINARY
    mask = threshold(gray, presence_binarize, mode)
    fraction = float((mask.data > 0).mean())
    if fraction < presence_threshold:
        return reading(ReadingKind.PART_QUALITY, "no_part", 1.0)
    res, _ = match_template_ssd(roi, good_template)
    label = "good" if res.normalized_score <= reject_score else "defect"
    confidence = max(0.0, min(1.0, 1.0 - res.normalized_score))
    return reading(
        ReadingKind.PART_QUALITY, label, confidence, detail={"score": res.normalized_score}
    )
