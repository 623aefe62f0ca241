"""Analytic raster primitives with coverage-based anti-aliasing.

All functions mutate a writable (h, w, 3) float64 canvas in place; the
panel composer converts to uint8 once at the end.
"""

from __future__ import annotations

import math

import numpy as np


def new_canvas(width: int, height: int, color) -> np.ndarray:
    canvas = np.empty((height, width, 3), dtype=np.float64)
    canvas[...] = color
    return canvas


def _blend(canvas: np.ndarray, ys: slice, xs: slice, coverage: np.ndarray, color) -> None:
    region = canvas[ys, xs]
    cov = coverage[..., None]
    region *= 1.0 - cov
    region += cov * np.asarray(color, dtype=np.float64)


def _window(canvas, x0, y0, x1, y1):
    h, w = canvas.shape[:2]
    ix0, iy0 = max(0, int(math.floor(x0))), max(0, int(math.floor(y0)))
    ix1, iy1 = min(w, int(math.ceil(x1)) + 1), min(h, int(math.ceil(y1)) + 1)
    if ix0 >= ix1 or iy0 >= iy1:
        return None
    ys, xs = np.meshgrid(np.arange(iy0, iy1), np.arange(ix0, ix1), indexing="ij")
    return slice(iy0, iy1), slice(ix0, ix1), xs.astype(np.float64), ys.astype(np.float64)


def fill_rect(canvas: np.ndarray, x: float, y: float, w: float, h: float, color) -> None:
    win = _window(canvas, x, y, x + w, y + h)
    if win is None:
        return
    sy, sx, xs, ys = win
    covx = np.clip(np.minimum(xs + 0.5 - x, x + w - xs + 0.5), 0, 1)
    covy = np.clip(np.minimum(ys + 0.5 - y, y + h - ys + 0.5), 0, 1)
    _blend(canvas, sy, sx, covx * covy, color)


def fill_circle(canvas: np.ndarray, cx: float, cy: float, r: float, color) -> None:
    win = _window(canvas, cx - r - 1, cy - r - 1, cx + r + 1, cy + r + 1)
    if win is None:
        return
    sy, sx, xs, ys = win
    dist = np.hypot(xs - cx, ys - cy)
    _blend(canvas, sy, sx, np.clip(r + 0.5 - dist, 0, 1), color)


def draw_ring(canvas: np.ndarray, cx: float, cy: float, r: float, thickness: float, color) -> None:
    pad = r + thickness / 2 + 1
    win = _window(canvas, cx - pad, cy - pad, cx + pad, cy + pad)
    if win is None:
        return
    sy, sx, xs, ys = win
    dist = np.abs(np.hypot(xs - cx, ys - cy) - r)
    _blend(canvas, sy, sx, np.clip(thickness / 2 + 0.5 - dist, 0, 1), color)


def draw_line(
    canvas: np.ndarray,
    x0: float,
    y0: float,
    x1: float,
    y1: float,
    thickness: float,
    color,
) -> None:
    pad = thickness / 2 + 1
    win = _window(
        canvas, min(x0, x1) - pad, min(y0, y1) - pad, max(x0, x1) + pad, max(y0, y1) + pad
    )
    if win is None:
        return
    sy, sx, xs, ys = win
    dx, dy = x1 - x0, y1 - y0
    len2 = dx * dx + dy * dy
    if len2 == 0:
        dist = np.hypot(xs - x0, ys - y0)
    else:
        t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / len2, 0, 1)
        dist = np.hypot(xs - (x0 + t * dx), ys - (y0 + t * dy))
    _blend(canvas, sy, sx, np.clip(thickness / 2 + 0.5 - dist, 0, 1), color)


def fill_rotated_rect(
    canvas: np.ndarray,
    cx: float,
    cy: float,
    w: float,
    h: float,
    angle_rad: float,
    color,
) -> None:
    pad = math.hypot(w, h) / 2 + 1
    win = _window(canvas, cx - pad, cy - pad, cx + pad, cy + pad)
    if win is None:
        return
    sy, sx, xs, ys = win
    ca, sa = math.cos(angle_rad), math.sin(angle_rad)
    u = (xs - cx) * ca + (ys - cy) * sa
    v = -(xs - cx) * sa + (ys - cy) * ca
    cov = np.clip(np.minimum(w / 2 + 0.5 - np.abs(u), h / 2 + 0.5 - np.abs(v)), 0, 1)
    _blend(canvas, sy, sx, cov, color)
