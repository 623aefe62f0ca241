"""One reader per factory-floor artifact class."""

from .discrete import LIGHT_COLORS, LightZone, read_safety_light, read_toggle
from .gauge import (
    NeedleFix,
    find_needle,
    preprocess,
    read_circular_gauge,
    read_knob,
    read_linear_gauge,
)
from .matchers import FixtureSpec, read_fixture_state, read_liquid_level, read_part_quality
from .segments import (
    DEFAULT_ZONES,
    DIGIT_SEGMENTS,
    GlyphTextParams,
    SegmentTemplate,
    SevenSegmentParams,
    classify_segment_states,
    read_glyph_text,
    read_seven_segment,
)
from .types import (
    GaugeCalibration,
    HoughParams,
    PreprocessParams,
    Reading,
    ReadingKind,
    map_needle_to_scale,
    not_found,
    reading,
)

__all__ = [
    "Reading",
    "ReadingKind",
    "GaugeCalibration",
    "PreprocessParams",
    "HoughParams",
    "map_needle_to_scale",
    "reading",
    "not_found",
    "preprocess",
    "find_needle",
    "NeedleFix",
    "read_circular_gauge",
    "read_linear_gauge",
    "read_knob",
    "read_toggle",
    "read_safety_light",
    "LightZone",
    "LIGHT_COLORS",
    "read_liquid_level",
    "read_fixture_state",
    "FixtureSpec",
    "read_part_quality",
    "SegmentTemplate",
    "SevenSegmentParams",
    "GlyphTextParams",
    "DEFAULT_ZONES",
    "DIGIT_SEGMENTS",
    "classify_segment_states",
    "read_seven_segment",
    "read_glyph_text",
]
