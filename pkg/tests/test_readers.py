import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panelsight.errors import ConfigError
from panelsight.imaging import Box, ImageBuffer, Point2
from panelsight.readers import (
    FixtureSpec,
    GaugeCalibration,
    HoughParams,
    LightZone,
    PreprocessParams,
    ReadingKind,
    SegmentTemplate,
    SevenSegmentParams,
    GlyphTextParams,
    classify_segment_states,
    map_needle_to_scale,
    read_circular_gauge,
    read_fixture_state,
    read_glyph_text,
    read_knob,
    read_linear_gauge,
    read_liquid_level,
    read_part_quality,
    read_safety_light,
    read_seven_segment,
    read_toggle,
)
from panelsight.readers.segments import DIGIT_SEGMENTS


def gray(arr):
    return ImageBuffer(np.asarray(arr, dtype=np.uint8))


class TestNeedleMapping:
    CAL = GaugeCalibration(x_min=0.0, x_max=math.pi, y_min=0.0, y_max=100.0)

    def test_endpoints(self):
        assert map_needle_to_scale(0.0, self.CAL) == 0.0
        assert map_needle_to_scale(math.pi, self.CAL) == 100.0

    def test_midpoint(self):
        assert map_needle_to_scale(math.pi / 2, self.CAL) == pytest.approx(50.0)

    def test_clamping(self):
        assert map_needle_to_scale(-1.0, self.CAL) == 0.0
        assert map_needle_to_scale(4.0, self.CAL) == 100.0

    def test_reversed_anchor_order(self):
        cal = GaugeCalibration(x_min=math.pi, x_max=0.0, y_min=0.0, y_max=100.0)
        assert map_needle_to_scale(math.pi, cal) == 0.0
        assert map_needle_to_scale(0.0, cal) == 100.0

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(-10, 10),
        st.floats(-10, 10),
        st.floats(0, 100),
        st.floats(0.1, 100),
    )
    def test_direction_flip_reflects_about_midpoint(self, x_min, dx, y_min, span):
        if abs(dx) < 1e-3:
            return
        fwd = GaugeCalibration(x_min=x_min, x_max=x_min + dx, y_min=y_min, y_max=y_min + span)
        rev = GaugeCalibration(
            x_min=x_min, x_max=x_min + dx, y_min=y_min, y_max=y_min + span, direction=-1
        )
        mid_y = y_min + span / 2
        for frac in (0.0, 0.25, 0.5, 1.0):
            x = x_min + frac * dx
            a = map_needle_to_scale(x, fwd)
            b = map_needle_to_scale(x, rev)
            assert a + b == pytest.approx(2 * mid_y, abs=1e-6)

    def test_midpoint_property_any_direction(self):
        cal = GaugeCalibration(x_min=2.0, x_max=-1.0, y_min=10.0, y_max=30.0, direction=-1)
        assert map_needle_to_scale(0.5, cal) == pytest.approx(20.0)

    def test_invalid_calibration(self):
        with pytest.raises(ConfigError):
            GaugeCalibration(x_min=1.0, x_max=1.0, y_min=0.0, y_max=1.0)
        with pytest.raises(ConfigError):
            GaugeCalibration(x_min=0.0, x_max=1.0, y_min=5.0, y_max=1.0)


def draw_needle_roi(angle: float, size: int = 101) -> ImageBuffer:
    """Bright field with a dark needle from the center at the given y-up angle."""
    arr = np.full((size, size), 230, dtype=np.uint8)
    c = size // 2
    for t in np.linspace(0, c - 6, 4 * size):
        x = int(round(c + t * math.cos(angle)))
        y = int(round(c - t * math.sin(angle)))
        arr[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2] = 20
    return gray(arr)


GAUGE_CAL = GaugeCalibration(
    x_min=5 * math.pi / 4,
    x_max=-math.pi / 4,
    y_min=0.0,
    y_max=100.0,
    pivot=Point2(50, 50),
)
PRE = PreprocessParams(blur_kernel=3, blur_sigma=1.0, threshold=90, invert=True)
HP = HoughParams(vote_threshold=12, pivot_radius=6.0)


class TestCircularGauge:
    def test_known_angles(self):
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            angle = 5 * math.pi / 4 + frac * (-math.pi / 4 - 5 * math.pi / 4)
            r = read_circular_gauge(draw_needle_roi(angle), GAUGE_CAL, PRE, HP)
            assert r.kind is ReadingKind.CIRCULAR_GAUGE
            assert r.value == pytest.approx(frac * 100.0, abs=2.0)

    def test_blank_face_not_found(self):
        blank = ImageBuffer.full(101, 101, 230)
        r = read_circular_gauge(blank, GAUGE_CAL, PRE, HP)
        assert r.value is None
        assert r.confidence == 0.0

    def test_missing_pivot_rejected(self):
        cal = GaugeCalibration(x_min=0.0, x_max=1.0, y_min=0.0, y_max=1.0)
        with pytest.raises(ConfigError):
            read_circular_gauge(ImageBuffer.full(10, 10, 0), cal)


class TestLinearGauge:
    CAL = GaugeCalibration(x_min=10.0, x_max=110.0, y_min=0.0, y_max=10.0, axis="horizontal")

    @staticmethod
    def bar_roi(x_needle: int) -> ImageBuffer:
        arr = np.full((40, 120), 235, dtype=np.uint8)
        arr[5:35, x_needle - 1 : x_needle + 2] = 20
        return gray(arr)

    def test_needle_positions(self):
        for x, expect in [(10, 0.0), (60, 5.0), (110, 10.0)]:
            r = read_linear_gauge(self.bar_roi(x), self.CAL, PRE, HP)
            assert r.value == pytest.approx(expect, abs=0.2)

    def test_parallel_needle_rejected(self):
        arr = np.full((40, 120), 235, dtype=np.uint8)
        arr[19:22, 10:110] = 20  # horizontal stroke on a horizontal axis
        r = read_linear_gauge(gray(arr), self.CAL, PRE, HP)
        assert r.value is None

    def test_empty_roi_not_found(self):
        r = read_linear_gauge(ImageBuffer.full(120, 40, 235), self.CAL, PRE, HP)
        assert r.value is None


class TestSegmentClassification:
    def test_all_foreground(self):
        cell = ImageBuffer.full(30, 50, 255)
        assert classify_segment_states(cell, SegmentTemplate()) == set("abcdefg")

    def test_all_background(self):
        cell = ImageBuffer.zeros(30, 50)
        assert classify_segment_states(cell, SegmentTemplate()) == set()

    def test_canonical_seven(self):
        assert DIGIT_SEGMENTS["7"] == frozenset("abc")

    def test_digit_map_injective(self):
        sets = list(DIGIT_SEGMENTS.values())
        assert len(set(sets)) == len(sets)


def seven_segment_roi(digits: str, cell_w: int = 30, cell_h: int = 50) -> ImageBuffer:
    from panelsight.readers.segments import DEFAULT_ZONES

    arr = np.zeros((cell_h, cell_w * len(digits)), dtype=np.uint8)
    for i, d in enumerate(digits):
        for name in DIGIT_SEGMENTS[d]:
            zx, zy, zw, zh = DEFAULT_ZONES[name]
            x0 = i * cell_w + int(zx * cell_w)
            y0 = int(zy * cell_h)
            arr[y0 : y0 + max(1, int(zh * cell_h)), x0 : x0 + max(1, int(zw * cell_w))] = 255
    return gray(arr)


class TestSevenSegment:
    def test_reads_digits(self):
        r = read_seven_segment(seven_segment_roi("8421"), 4)
        assert r.value == "8421"
        assert r.confidence == 1.0

    def test_all_lit_is_eight(self):
        r = read_seven_segment(ImageBuffer.full(90, 50, 255), 3)
        assert r.value == "888"

    def test_corrupted_cell_yields_question_mark(self):
        roi = seven_segment_roi("123").to_array()
        # clear the middle cell entirely except one stray segment area:
        roi[:, 30:60] = 0
        roi[0:7, 34:56] = 255  # lone 'a' segment maps to no digit
        r = read_seven_segment(gray(roi), 3)
        assert r.value[1] == "?"
        assert r.value[0] == "1" and r.value[2] == "3"
        assert r.confidence == pytest.approx(2 / 3)

    def test_zero_digit_count_rejected(self):
        with pytest.raises(ConfigError):
            read_seven_segment(ImageBuffer.zeros(10, 10), 0)


def glyph(pattern: list[str]) -> ImageBuffer:
    arr = np.array([[255 if c == "#" else 0 for c in row] for row in pattern], dtype=np.uint8)
    return ImageBuffer(arr)


GLYPHS = [
    ("R", glyph(["###", "#.#", "##.", "#.#", "#.#"])),
    ("U", glyph(["#.#", "#.#", "#.#", "#.#", "###"])),
    ("N", glyph(["#.#", "###", "###", "#.#", "#.#"])),
]


def tile_glyphs(chars: str, gap: int = 2) -> ImageBuffer:
    lib = dict((c, t) for c, t in GLYPHS)
    cols = []
    for i, c in enumerate(chars):
        if i:
            cols.append(np.zeros((5, gap), dtype=np.uint8))
        cols.append(lib[c].data)
    return ImageBuffer(np.hstack(cols))


class TestGlyphText:
    def test_self_match(self):
        r = read_glyph_text(tile_glyphs("RUN"), GLYPHS)
        assert r.value == "RUN"
        assert r.confidence == 1.0

    def test_blank_roi(self):
        r = read_glyph_text(ImageBuffer.zeros(20, 5), GLYPHS)
        assert r.value == ""

    def test_noise_glyph_rejected(self):
        img = tile_glyphs("RUN").to_array()
        rng = np.random.default_rng(7)
        img[:, 5:8] = rng.choice([0, 255], size=(5, 3))  # corrupt the U
        r = read_glyph_text(gray(img), GLYPHS, GlyphTextParams(accept_score=0.05))
        assert r.value[0] == "R"
        assert "?" in r.value

    def test_empty_library_rejected(self):
        with pytest.raises(ConfigError):
            read_glyph_text(ImageBuffer.zeros(5, 5), [])


class TestKnob:
    DETENTS = [("OFF", 0.0), ("ON", math.pi / 2)]
    CAL = GaugeCalibration(x_min=0, x_max=1, y_min=0, y_max=1, pivot=Point2(50, 50))
    PRE = PreprocessParams(blur_kernel=3, blur_sigma=1.0, threshold=90, invert=True)

    def test_pointer_at_detent(self):
        r = read_knob(draw_needle_roi(0.0), self.CAL, self.DETENTS, self.PRE, HP)
        assert r.value == "OFF"
        assert r.confidence >= 0.9

    def test_between_detents_first_wins_with_zero_confidence(self):
        r = read_knob(draw_needle_roi(math.pi / 4), self.CAL, self.DETENTS, self.PRE, HP)
        assert r.value == "OFF"
        assert r.confidence == pytest.approx(0.0, abs=0.05)

    def test_single_detent_always_matches(self):
        r = read_knob(draw_needle_roi(2.0), self.CAL, [("ONLY", 0.0)], self.PRE, HP)
        assert r.value == "ONLY"

    def test_duplicate_detent_angles_rejected(self):
        with pytest.raises(ConfigError):
            read_knob(draw_needle_roi(0.0), self.CAL, [("A", 0.0), ("B", 0.0)])


class TestToggle:
    def test_exact_state_match(self):
        up = ImageBuffer.full(8, 8, 200)
        down = ImageBuffer.full(8, 8, 30)
        r = read_toggle(up, [("UP", up), ("DOWN", down)])
        assert r.value == "UP"
        assert r.confidence > 0.5

    def test_identical_templates_tie(self):
        t = ImageBuffer.full(8, 8, 99)
        r = read_toggle(t, [("A", t), ("B", t)])
        assert r.value == "A"
        assert r.confidence == 0.0

    def test_template_size_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            read_toggle(
                ImageBuffer.zeros(8, 8),
                [("A", ImageBuffer.zeros(4, 4)), ("B", ImageBuffer.zeros(5, 4))],
            )


class TestSafetyLight:
    ZONES = [
        LightZone("red", Box(0, 0, 10, 10)),
        LightZone("yellow", Box(0, 10, 10, 10)),
        LightZone("green", Box(0, 20, 10, 10)),
    ]

    @staticmethod
    def roi(zone_colors):
        arr = np.full((30, 10, 3), 20, dtype=np.uint8)
        for i, color in enumerate(zone_colors):
            if color is not None:
                arr[i * 10 : (i + 1) * 10] = color
        return ImageBuffer(arr)

    def test_red_dominance(self):
        r = read_safety_light(
            self.roi([(220, 20, 20), None, None]), self.ZONES, lit_threshold=60
        )
        assert r.value == "red"

    def test_all_dark_off(self):
        r = read_safety_light(self.roi([None, None, None]), self.ZONES)
        assert r.value == "off"

    def test_dim_zone_below_threshold_off(self):
        r = read_safety_light(self.roi([(90, 10, 10), None, None]), self.ZONES)
        assert r.value == "off"

    def test_multiple(self):
        r = read_safety_light(
            self.roi([(220, 20, 20), None, (20, 220, 40)]), self.ZONES, lit_threshold=60
        )
        assert r.value == "multiple"

    def test_bright_but_wrong_hue_not_lit(self):
        # bright white has no dominant channel
        r = read_safety_light(self.roi([(230, 230, 230), None, None]), self.ZONES)
        assert r.value == "off"


class TestLiquidLevel:
    @staticmethod
    def column(surface_row: int, h: int = 100) -> ImageBuffer:
        arr = np.full((h, 12), 220, dtype=np.uint8)
        arr[surface_row : surface_row + 2] = 255
        arr[surface_row + 2 :] = 60
        return gray(arr)

    def make_template(self):
        ref = self.column(50)
        return ImageBuffer(ref.data[46:56].copy())

    def test_surface_at_zero_reference(self):
        tmpl = self.make_template()
        r = read_liquid_level(self.column(50), tmpl, 46, 1.0, Box(0, 0, 12, 100))
        assert r.value == 0.0

    def test_level_scaling(self):
        tmpl = self.make_template()
        # surface 20 rows above reference at 0.5 units/px -> 10 units
        r = read_liquid_level(self.column(30), tmpl, 46, 0.5, Box(0, 0, 12, 100))
        assert r.value == pytest.approx(10.0)

    def test_noise_rejected(self):
        tmpl = self.make_template()
        noise = ImageBuffer(
            np.random.default_rng(3).choice([0, 255], size=(100, 12)).astype(np.uint8)
        )
        r = read_liquid_level(noise, tmpl, 46, 1.0, Box(0, 0, 12, 100), reject_score=0.05)
        assert r.value is None


class TestFixtureState:
    def test_empty_fixture_list_ok(self):
        r = read_fixture_state(ImageBuffer.zeros(20, 20), [])
        assert r.value == "ok"
        assert r.detail == {"fixtures": {}}

    def test_exact_fixture_aligned(self):
        frame = np.full((40, 40), 200, dtype=np.uint8)
        frame[10:20, 10:20] = 40
        tmpl = ImageBuffer(frame[8:22, 8:22].copy())
        fx = FixtureSpec("f1", Box(8, 8, 14, 14), tmpl)
        r = read_fixture_state(gray(frame), [fx])
        assert r.value == "ok"

    def test_shifted_fixture_misaligned(self):
        frame = np.full((60, 60), 200, dtype=np.uint8)
        frame[10:20, 10:20] = 40
        tmpl = gray(frame[8:22, 8:22].copy())
        shifted = np.full((60, 60), 200, dtype=np.uint8)
        shifted[10:20, 22:32] = 40  # moved 12 px right
        fx = FixtureSpec("f1", Box(8, 8, 14, 14), tmpl)
        r = read_fixture_state(gray(shifted), [fx], search_margin=1.5)
        assert r.value == "fault"
        assert r.detail["fixtures"]["f1"] == "misaligned"


class TestPartQuality:
    @staticmethod
    def part_roi(present: bool, blemish: bool = False) -> ImageBuffer:
        arr = np.full((30, 30), 210, dtype=np.uint8)
        if present:
            arr[8:22, 8:22] = 70
            if blemish:
                arr[10:18, 10:18] = 210
        return gray(arr)

    def test_exact_good(self):
        tmpl = self.part_roi(True)
        r = read_part_quality(self.part_roi(True), tmpl)
        assert r.value == "good"
        assert r.detail["score"] == 0.0

    def test_no_part(self):
        r = read_part_quality(self.part_roi(False), self.part_roi(True))
        assert r.value == "no_part"

    def test_defect(self):
        r = read_part_quality(self.part_roi(True, blemish=True), self.part_roi(True))
        assert r.value == "defect"
