"""Seven-segment display reading and glyph-template text recognition."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..errors import ConfigError
from ..imaging import (
    BINARY,
    BINARY_INVERTED,
    Box,
    ImageBuffer,
    crop_roi,
    match_template_ssd,
    threshold,
    to_grayscale,
)
from .types import Reading, ReadingKind, reading

# fractional (x, y, w, h) zones of a digit cell
DEFAULT_ZONES = MappingProxyType(
    {
        "a": (0.15, 0.00, 0.70, 0.15),
        "b": (0.78, 0.08, 0.22, 0.37),
        "c": (0.78, 0.55, 0.22, 0.37),
        "d": (0.15, 0.85, 0.70, 0.15),
        "e": (0.00, 0.55, 0.22, 0.37),
        "f": (0.00, 0.08, 0.22, 0.37),
        "g": (0.15, 0.425, 0.70, 0.15),
    }
)

DIGIT_SEGMENTS = MappingProxyType(
    {
        "0": frozenset("abcdef"),
        "1": frozenset("bc"),
        "2": frozenset("abdeg"),
        "3": frozenset("abcdg"),
        "4": frozenset("bcfg"),
        "5": frozenset("acdfg"),
        "6": frozenset("acdefg"),
        "7": frozenset("abc"),
        "8": frozenset("abcdefg"),
        "9": frozenset("abcdfg"),
    }
)


@dataclass(frozen=True)
class SegmentTemplate:
    """Segment zone layout plus the lit-set -> digit dictionary."""

    zones: dict = field(default_factory=lambda: dict(DEFAULT_ZONES))
    lit_fraction: float = 0.5
    digit_map: dict = field(default_factory=lambda: dict(DIGIT_SEGMENTS))

    def __post_init__(self):
        errors = []
        if not 0.0 < self.lit_fraction < 1.0:
            errors.append(f"lit_fraction must be in (0,1), got {self.lit_fraction}")
        for name, (x, y, w, h) in self.zones.items():
            if not (0 <= x and 0 <= y and w > 0 and h > 0 and x + w <= 1.0 + 1e-9 and y + h <= 1.0 + 1e-9):
                errors.append(f"zone {name!r} outside the unit cell")
        sets = list(self.digit_map.values())
        if len(set(sets)) != len(sets):
            errors.append("digit map must be injective")
        if errors:
            raise ConfigError(errors)

    def lookup(self, lit: frozenset) -> str | None:
        for digit, segs in self.digit_map.items():
            if segs == lit:
                return digit
        return None


def classify_segment_states(cell: ImageBuffer, tmpl: SegmentTemplate) -> set:
    """Segments whose zone holds at least ``lit_fraction`` foreground."""
    if cell.channels != 1:
        raise ConfigError(["segment cell must be a 1-channel binary image"])
    h, w = cell.height, cell.width
    lit = set()
    for name, (zx, zy, zw, zh) in tmpl.zones.items():
        x0 = int(round(zx * w))
        y0 = int(round(zy * h))
        x1 = max(x0 + 1, int(round((zx + zw) * w)))
        y1 = max(y0 + 1, int(round((zy + zh) * h)))
        zone = cell.data[y0 : min(y1, h), x0 : min(x1, w)]
        if zone.size and (zone > 0).mean() >= tmpl.lit_fraction:
            lit.add(name)
    return lit


@dataclass(frozen=True)
class SevenSegmentParams:
    threshold: int = 128
    invert: bool = False  # lit segments brighter than background
    cell_gap_frac: float = 0.0  # fraction of cell width ignored between cells


def read_seven_segment(
    roi: ImageBuffer,
    digit_count: int,
    tmpl: SegmentTemplate | None = None,
    params: SevenSegmentParams | None = None,
) -> Reading:
    """Split the ROI into equally spaced digit cells and decode each one.

    Unrecognized lit-sets decode to '?'; overall confidence is the fraction
    of recognized digits.
    """
    if digit_count < 1:
        raise ConfigError(["digit_count must be >= 1"])
    tmpl = tmpl or SegmentTemplate()
    params = params or SevenSegmentParams()
    gray = to_grayscale(roi) if roi.channels == 3 else roi
    mode = BINARY_INVERTED if params.invert else BINARY
    binary = threshold(gray, params.threshold, mode)

    cell_w = binary.width / digit_count
    pad = params.cell_gap_frac * cell_w / 2.0
    digits = []
    recognized = 0
    for i in range(digit_count):
        x0 = int(round(i * cell_w + pad))
        x1 = int(round((i + 1) * cell_w - pad))
        cell = crop_roi(binary, Box(x0, 0, max(1, x1 - x0), binary.height))
        lit = frozenset(classify_segment_states(cell, tmpl))
        digit = tmpl.lookup(lit)
        if digit is None:
            digits.append("?")
        else:
            digits.append(digit)
            recognized += 1
    return reading(
        ReadingKind.SEVEN_SEGMENT, "".join(digits), recognized / digit_count
    )


@dataclass(frozen=True)
class GlyphTextParams:
    threshold: int = 128
    invert: bool = False
    accept_score: float = 0.05  # max normalized SSD for a confident match
    min_gap_cols: int = 1


def read_glyph_text(
    roi: ImageBuffer,
    glyph_library: list[tuple[str, ImageBuffer]],
    params: GlyphTextParams | None = None,
) -> Reading:
    """Segment characters by vertical projection gaps and match each box
    against the glyph library by SSD."""
    if not glyph_library:
        raise ConfigError(["glyph library must not be empty"])
    heights = {t.height for _, t in glyph_library}
    if len(heights) != 1:
        raise ConfigError(["glyph templates must share one height"])
    params = params or GlyphTextParams()

    gray = to_grayscale(roi) if roi.channels == 3 else roi
    mode = BINARY_INVERTED if params.invert else BINARY
    binary = threshold(gray, params.threshold, mode)

    boxes = _projection_boxes(binary.data, params.min_gap_cols)
    text = []
    matched = 0
    for x0, x1 in boxes:
        crop = binary.data[:, x0:x1]
        best_char, best_score = None, None
        for ch, tmpl in glyph_library:
            t = threshold(
                to_grayscale(tmpl) if tmpl.channels == 3 else tmpl,
                params.threshold,
                mode,
            )
            score = _padded_ssd(crop, t.data)
            if best_score is None or score < best_score:
                best_char, best_score = ch, score
        if best_score is not None and best_score <= params.accept_score:
            text.append(best_char)
            matched += 1
        else:
            text.append("?")
    confidence = matched / len(boxes) if boxes else 1.0
    return reading(ReadingKind.GLYPH_TEXT, "".join(text), confidence)


def _projection_boxes(binary: np.ndarray, min_gap: int) -> list[tuple[int, int]]:
    occupied = (binary > 0).any(axis=0)
    boxes = []
    start = None
    gap = min_gap
    for x, occ in enumerate(occupied):
        if occ:
            if start is None:
                start = x
            end = x
            gap = 0
        elif start is not None:
            gap += 1
            if gap >= min_gap:
                boxes.append((start, end + 1))
                start = None
    if start is not None:
        boxes.append((start, end + 1))
    return boxes


def _padded_ssd(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized SSD after zero-padding both arrays to a common size."""
    h = max(a.shape[0], b.shape[0])
    w = max(a.shape[1], b.shape[1])

    def pad(m):
        out = np.zeros((h, w), dtype=np.int64)
        out[: m.shape[0], : m.shape[1]] = m
        return out

    diff = pad(a) - pad(b)
    return float((diff * diff).sum()) / (h * w * 255 * 255)
