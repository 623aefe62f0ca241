"""Per-artifact patch renderers and the calibrations they imply.

Every renderer derives geometry analytically from the ground-truth state,
so the truth record is exact by construction. ``pipeline_params`` returns
the reader parameter document matching what was drawn.
"""

from __future__ import annotations

import base64
import math

import numpy as np

from ..errors import SpecError
from ..imaging import Box, ImageBuffer, encode_png
from .draw import draw_line, draw_ring, fill_circle, fill_rect, fill_rotated_rect, new_canvas
from ..readers.segments import DEFAULT_ZONES, DIGIT_SEGMENTS

# gauge sweep in y-up math radians: min at lower-left, 270 degrees clockwise
# through the top to lower-right
GAUGE_X_MIN = 5 * math.pi / 4
GAUGE_X_MAX = -math.pi / 4

DEFAULT_DETENTS = [
    ("OFF", 5 * math.pi / 4),
    ("LOW", 3 * math.pi / 4),
    ("MED", math.pi / 4),
    ("HIGH", -math.pi / 4),
]

FIXTURE_GRID = (3, 2)  # columns x rows -> six fixtures
PART_STATES = ("none", "unmachined", "partial", "good")

_BG = (200.0, 201.0, 205.0)


def _needle_tip(cx, cy, length, angle):
    # y axis points down in raster coordinates
    return cx + length * math.cos(angle), cy - length * math.sin(angle)


def _scale_range(style) -> tuple[float, float]:
    return float(style.get("y_min", 0.0)), float(style.get("y_max", 100.0))


def render_circular_gauge(w: int, h: int, value: float, style: dict) -> np.ndarray:
    y_min, y_max = _scale_range(style)
    if not y_min <= value <= y_max:
        raise SpecError(f"gauge value {value} outside scale [{y_min}, {y_max}]")
    canvas = new_canvas(w, h, style.get("background", _BG))
    cx, cy = w / 2.0, h / 2.0
    radius = min(w, h) / 2.0 - 2
    fill_circle(canvas, cx, cy, radius, (236, 236, 239))
    draw_ring(canvas, cx, cy, radius, 2.0, (168, 168, 174))
    # scale-end ticks near the rim
    for ang in (GAUGE_X_MIN, GAUGE_X_MAX):
        x0, y0 = _needle_tip(cx, cy, radius * 0.82, ang)
        x1, y1 = _needle_tip(cx, cy, radius * 0.95, ang)
        draw_line(canvas, x0, y0, x1, y1, 2.0, (128, 128, 134))
    frac = (value - y_min) / (y_max - y_min)
    angle = GAUGE_X_MIN + frac * (GAUGE_X_MAX - GAUGE_X_MIN)
    tx, ty = _needle_tip(cx, cy, radius * 0.78, angle)
    draw_line(canvas, cx, cy, tx, ty, 3.0, (22, 22, 28))
    fill_circle(canvas, cx, cy, 3.0, (22, 22, 28))
    return canvas


def render_linear_gauge(w: int, h: int, value: float, style: dict) -> np.ndarray:
    y_min, y_max = _scale_range(style)
    if not y_min <= value <= y_max:
        raise SpecError(f"gauge value {value} outside scale [{y_min}, {y_max}]")
    canvas = new_canvas(w, h, style.get("background", _BG))
    margin = 4
    bar_h = min(h - 8, 26)
    bar_y = h / 2.0 - bar_h / 2.0
    fill_rect(canvas, margin, bar_y, w - 2 * margin, bar_h, (242, 242, 244))
    # top/bottom rails only: vertical strokes would mimic the needle
    fill_rect(canvas, margin, bar_y - 2, w - 2 * margin, 2, (80, 80, 85))
    fill_rect(canvas, margin, bar_y + bar_h, w - 2 * margin, 2, (80, 80, 85))
    x_lo, x_hi = linear_gauge_pixel_range(w)
    frac = (value - y_min) / (y_max - y_min)
    x = x_lo + frac * (x_hi - x_lo)
    draw_line(canvas, x, bar_y + 1, x, bar_y + bar_h - 1, 3.0, (25, 25, 30))
    return canvas


def linear_gauge_pixel_range(w: int) -> tuple[float, float]:
    margin = 4
    return margin + 3.0, w - margin - 3.0


SEGMENT_LIT = (255.0, 176.0, 0.0)
SEGMENT_OFF = (34.0, 34.0, 40.0)
SEGMENT_BG = (16.0, 16.0, 20.0)


def render_seven_segment(w: int, h: int, digits: str, style: dict) -> np.ndarray:
    if not digits or not all(d in DIGIT_SEGMENTS for d in digits):
        raise SpecError(f"seven-segment state must be digits 0-9, got {digits!r}")
    canvas = new_canvas(w, h, SEGMENT_BG)
    n = len(digits)
    cell_w = w / n
    for i, d in enumerate(digits):
        lit = DIGIT_SEGMENTS[d]
        for name, (zx, zy, zw, zh) in DEFAULT_ZONES.items():
            color = SEGMENT_LIT if name in lit else SEGMENT_OFF
            fill_rect(
                canvas,
                i * cell_w + zx * cell_w,
                zy * h,
                zw * cell_w,
                zh * h,
                color,
            )
    return canvas


def render_knob(w: int, h: int, label: str, style: dict) -> np.ndarray:
    detents = style.get("detents") or DEFAULT_DETENTS
    detents = [(str(l), float(a)) for l, a in detents]
    angle = next((a for l, a in detents if l == label), None)
    if angle is None:
        raise SpecError(f"knob state {label!r} not among detents")
    canvas = new_canvas(w, h, (140, 142, 146))
    cx, cy = w / 2.0, h / 2.0
    radius = min(w, h) / 2.0 - 2
    fill_circle(canvas, cx, cy, radius, (58, 60, 64))
    draw_ring(canvas, cx, cy, radius, 1.5, (30, 30, 34))
    tx, ty = _needle_tip(cx, cy, radius * 0.8, angle)
    draw_line(canvas, cx, cy, tx, ty, 3.0, (238, 238, 242))
    return canvas


TOGGLE_LABELS = ("up", "down")


def render_toggle(w: int, h: int, state: str, style: dict) -> np.ndarray:
    if state not in TOGGLE_LABELS:
        raise SpecError(f"toggle state must be one of {TOGGLE_LABELS}, got {state!r}")
    canvas = new_canvas(w, h, (118, 120, 126))
    fill_rect(canvas, 1, 1, w - 2, h - 2, (96, 98, 104))
    cx, cy = w / 2.0, h / 2.0
    fill_circle(canvas, cx, cy, min(w, h) * 0.18, (50, 52, 56))
    lever_len = h * 0.34
    end_y = cy - lever_len if state == "up" else cy + lever_len
    draw_line(canvas, cx, cy, cx, end_y, max(3.0, w * 0.18), (228, 228, 232))
    fill_circle(canvas, cx, end_y, max(2.5, w * 0.13), (244, 244, 248))
    return canvas


LIGHT_SEQUENCE = ("red", "yellow", "green")
_LIT_COLORS = {
    "red": (232.0, 32.0, 32.0),
    "yellow": (230.0, 222.0, 36.0),
    "green": (36.0, 222.0, 64.0),
}
_DIM_COLORS = {
    "red": (64.0, 22.0, 22.0),
    "yellow": (62.0, 60.0, 22.0),
    "green": (22.0, 60.0, 28.0),
}
LIGHT_STATES = LIGHT_SEQUENCE + ("off",)


def render_safety_light(w: int, h: int, state: str, style: dict) -> np.ndarray:
    if state not in LIGHT_STATES:
        raise SpecError(f"safety light state must be one of {LIGHT_STATES}, got {state!r}")
    canvas = new_canvas(w, h, (44, 45, 49))
    zone_h = h / 3.0
    for i, color in enumerate(LIGHT_SEQUENCE):
        cy = (i + 0.5) * zone_h
        r = min(w / 2.0, zone_h / 2.0) - 1
        lit = state == color
        fill_circle(canvas, w / 2.0, cy, r, _LIT_COLORS[color] if lit else _DIM_COLORS[color])
    return canvas


def safety_light_zones(box_w: int, box_h: int) -> list[dict]:
    """ROI-relative third-of-height zones matching the render layout."""
    zone_h = box_h // 3
    return [
        {"color": color, "box": {"x": 0, "y": i * zone_h, "w": box_w, "h": zone_h}}
        for i, color in enumerate(LIGHT_SEQUENCE)
    ]


VESSEL_WALL = 3
_AIR = (226.0, 233.0, 241.0)
_LIQUID = (36.0, 82.0, 192.0)
_SURFACE = (252.0, 252.0, 255.0)


def liquid_geometry(w: int, h: int) -> dict:
    """Interior box and level-to-row mapping shared by render and calibration."""
    top = VESSEL_WALL
    bottom = h - VESSEL_WALL  # exclusive
    zero_row = bottom - 10  # surface row at level 0, keeps the template band inside
    full_row = top + 8  # surface row at level 100
    return {
        "interior": Box(VESSEL_WALL, top, w - 2 * VESSEL_WALL, bottom - top),
        "zero_row": zero_row,
        "px_per_unit": (zero_row - full_row) / 100.0,
    }


def liquid_surface_row(w: int, h: int, level: float) -> int:
    geo = liquid_geometry(w, h)
    return int(round(geo["zero_row"] - level * geo["px_per_unit"]))


def render_liquid_vessel(w: int, h: int, level: float, style: dict) -> np.ndarray:
    if not 0.0 <= level <= 100.0:
        raise SpecError(f"liquid level must be in [0, 100], got {level}")
    canvas = new_canvas(w, h, (70, 72, 78))
    geo = liquid_geometry(w, h)
    box = geo["interior"]
    fill_rect(canvas, box.x, box.y, box.w, box.h, _AIR)
    row = liquid_surface_row(w, h, level)
    fill_rect(canvas, box.x, row, box.w, box.y2 - row, _LIQUID)
    fill_rect(canvas, box.x, row - 1, box.w, 3, _SURFACE)
    return canvas


FIXTURE_IDS = tuple(f"f{i + 1}" for i in range(FIXTURE_GRID[0] * FIXTURE_GRID[1]))
_BED = (184.0, 187.0, 191.0)
_FIXTURE = (40.0, 44.0, 48.0)
_NOTCH = (221.0, 221.0, 82.0)


def fixture_layout(w: int, h: int) -> dict:
    """Nominal fixture boxes, ROI-relative."""
    cols, rows = FIXTURE_GRID
    size = int(min(w / (cols + 1), h / (rows + 1)) * 0.72)
    boxes = {}
    for r in range(rows):
        for c in range(cols):
            cx = (c + 1) * w / (cols + 1)
            cy = (r + 1) * h / (rows + 1)
            boxes[FIXTURE_IDS[r * cols + c]] = Box(
                int(round(cx - size / 2)), int(round(cy - size / 2)), size, size
            )
    return boxes


def _draw_fixture(canvas, cx, cy, size, rot_rad):
    fill_rotated_rect(canvas, cx, cy, size, size, rot_rad, _FIXTURE)
    # off-center notch makes rotation visible to SSD
    nx = cx + (size * 0.22) * math.cos(rot_rad) - (size * 0.22) * math.sin(rot_rad)
    ny = cy + (size * 0.22) * math.sin(rot_rad) + (size * 0.22) * math.cos(rot_rad)
    fill_rotated_rect(canvas, nx, ny, size * 0.3, size * 0.3, rot_rad, _NOTCH)


def render_fixture_bed(w: int, h: int, state: dict, style: dict) -> np.ndarray:
    """``state`` maps fixture id -> {dx, dy, rot_deg} for misaligned fixtures."""
    state = state or {}
    layout = fixture_layout(w, h)
    unknown = set(state) - set(layout)
    if unknown:
        raise SpecError(f"unknown fixture ids in state: {sorted(unknown)}")
    canvas = new_canvas(w, h, _BED)
    for fid, box in layout.items():
        delta = state.get(fid, {})
        cx, cy = box.center()
        _draw_fixture(
            canvas,
            cx + float(delta.get("dx", 0)),
            cy + float(delta.get("dy", 0)),
            box.w * 0.92,
            math.radians(float(delta.get("rot_deg", 0))),
        )
    return canvas


def render_fixture_template(size: int) -> np.ndarray:
    canvas = new_canvas(size, size, _BED)
    _draw_fixture(canvas, size / 2.0, size / 2.0, size * 0.92, 0.0)
    return canvas


_PART_BG = (214.0, 217.0, 221.0)
_PART_BODY = (76.0, 79.0, 84.0)


def render_part(w: int, h: int, state: str, style: dict) -> np.ndarray:
    if state not in PART_STATES:
        raise SpecError(f"part state must be one of {PART_STATES}, got {state!r}")
    canvas = new_canvas(w, h, _PART_BG)
    if state == "none":
        return canvas
    cx, cy = w / 2.0, h / 2.0
    radius = min(w, h) * 0.38
    fill_circle(canvas, cx, cy, radius, _PART_BODY)
    if state in ("partial", "good"):
        bore = radius * (0.18 if state == "partial" else 0.34)
        fill_circle(canvas, cx, cy, bore, _PART_BG)
    if state == "good":
        for k in range(4):
            ang = k * math.pi / 2 + math.pi / 4
            bx = cx + radius * 0.62 * math.cos(ang)
            by = cy + radius * 0.62 * math.sin(ang)
            fill_circle(canvas, bx, by, radius * 0.12, _PART_BG)
    return canvas


def to_image(canvas: np.ndarray) -> ImageBuffer:
    return ImageBuffer(np.clip(np.round(canvas), 0, 255).astype(np.uint8))


def _png_b64(canvas: np.ndarray) -> str:
    return base64.b64encode(encode_png(to_image(canvas))).decode("ascii")


def pipeline_params(kind: str, box_w: int, box_h: int, style: dict | None = None) -> dict:
    """Reader parameter document for an artifact rendered at the given size.

    Coordinates are ROI-relative; templates are baked in as base64 PNG.
    """
    style = style or {}
    if kind == "circular_gauge":
        y_min, y_max = _scale_range(style)
        return {
            "pivot": {"x": box_w / 2.0, "y": box_h / 2.0},
            "x_min": GAUGE_X_MIN,
            "x_max": GAUGE_X_MAX,
            "y_min": y_min,
            "y_max": y_max,
            "direction": 1,
            "blur_kernel": 3,
            "blur_sigma": 1.0,
            "threshold": 90,
            "invert": True,
            "vote_threshold": 12,
            "pivot_radius": 6.0,
        }
    if kind == "linear_gauge":
        y_min, y_max = _scale_range(style)
        x_lo, x_hi = linear_gauge_pixel_range(box_w)
        return {
            "axis": "horizontal",
            "x_min": x_lo,
            "x_max": x_hi,
            "y_min": y_min,
            "y_max": y_max,
            "direction": 1,
            "blur_kernel": 3,
            "blur_sigma": 1.0,
            "threshold": 90,
            "invert": True,
            "vote_threshold": 10,
        }
    if kind == "seven_segment":
        return {
            "digit_count": int(style.get("digit_count", 4)),
            "threshold": 110,
            "invert": False,
            "lit_fraction": 0.5,
        }
    if kind == "knob":
        detents = style.get("detents") or DEFAULT_DETENTS
        return {
            "pivot": {"x": box_w / 2.0, "y": box_h / 2.0},
            "detents": [{"label": str(l), "angle": float(a)} for l, a in detents],
            "blur_kernel": 3,
            "blur_sigma": 1.0,
            "threshold": 200,
            "invert": False,
            "vote_threshold": 8,
            "pivot_radius": 6.0,
        }
    if kind == "toggle":
        return {
            "states": [
                {"label": label, "image_b64": _png_b64(render_toggle(box_w, box_h, label, style))}
                for label in TOGGLE_LABELS
            ]
        }
    if kind == "safety_light":
        return {"zones": safety_light_zones(box_w, box_h), "lit_threshold": 60.0}
    if kind == "liquid_level":
        geo = liquid_geometry(box_w, box_h)
        ref_level = 50.0
        row = liquid_surface_row(box_w, box_h, ref_level)
        band_top = row - 6
        patch = render_liquid_vessel(box_w, box_h, ref_level, style)
        interior = geo["interior"]
        band = patch[band_top : row + 6, interior.x : interior.x2]
        scale = 1.0 / geo["px_per_unit"]
        return {
            "template_b64": _png_b64(band),
            # anchor the reference at the template's top row so that
            # (zero_reference - match_row) * scale recovers the level
            "zero_reference": geo["zero_row"] - 6,
            "scale": scale,
            "search_column": {
                "x": interior.x,
                "y": interior.y,
                "w": interior.w,
                "h": interior.h,
            },
            "reject_score": 0.15,
        }
    if kind == "fixture_state":
        layout = fixture_layout(box_w, box_h)
        fixtures = []
        for fid, box in layout.items():
            fixtures.append(
                {
                    "fixture_id": fid,
                    "box": {"x": box.x, "y": box.y, "w": box.w, "h": box.h},
                    "template_b64": _png_b64(render_fixture_template(box.w)),
                }
            )
        return {
            "fixtures": fixtures,
            "misalign_score": 0.02,
            "search_margin": 0.25,
            "center_tolerance": 4.0,
        }
    if kind == "part_quality":
        return {
            "template_b64": _png_b64(render_part(box_w, box_h, "good", style)),
            "reject_score": 0.005,
            "presence_threshold": 0.02,
            "presence_binarize": 128,
            "presence_invert": True,
        }
    raise SpecError(f"no mock calibration for artifact kind {kind!r}")
