"""Needle-based readers: circular gauge, linear gauge, knob."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..imaging import (
    BINARY,
    BINARY_INVERTED,
    ImageBuffer,
    Point2,
    PolarLine,
    gaussian_blur,
    hough_lines,
    threshold,
    to_grayscale,
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

_REFINE_BAND = 2.5  # px either side of the detected line used for refinement


def preprocess(roi: ImageBuffer, pre: PreprocessParams) -> ImageBuffer:
    """gray -> blur -> binary mask of the segmentation target."""
    img = to_grayscale(roi) if roi.channels == 3 else roi
    if pre.blur_kernel > 1:
        img = gaussian_blur(img, pre.blur_kernel, pre.blur_sigma)
    mode = BINARY_INVERTED if pre.invert else BINARY
    return threshold(img, pre.threshold, mode)


@dataclass(frozen=True)
class NeedleFix:
    """A located needle: continuous angle plus detection metadata."""

    angle: float  # radians, y-up math convention
    length: float  # px from pivot to tip
    votes: int
    line: PolarLine

    @property
    def confidence(self) -> float:
        if self.length <= 0:
            return 0.0
        return min(1.0, self.votes / self.length)


def find_needle(binary: ImageBuffer, pivot: Point2, hp: HoughParams) -> NeedleFix | None:
    """Strongest Hough line passing near the pivot, resolved to the half-line
    holding more foreground mass, with a centroid-refined angle."""
    lines = hough_lines(binary, hp.rho_res, hp.theta_res, hp.vote_threshold)
    line = next(
        (l for l in lines if l.distance_to(pivot.x, pivot.y) <= hp.pivot_radius), None
    )
    if line is None:
        return None

    ys, xs = np.nonzero(binary.data)
    px = xs.astype(np.float64) - pivot.x
    py = ys.astype(np.float64) - pivot.y
    # unit direction along the line and signed distance across it
    ux, uy = -math.sin(line.theta), math.cos(line.theta)
    proj = px * ux + py * uy
    perp = np.abs(px * math.cos(line.theta) + py * math.sin(line.theta) - (
        line.rho - (pivot.x * math.cos(line.theta) + pivot.y * math.sin(line.theta))
    ))
    near = perp <= _REFINE_BAND
    pos = near & (proj > 1.0)
    neg = near & (proj < -1.0)
    if pos.sum() == 0 and neg.sum() == 0:
        return None
    if neg.sum() > pos.sum():
        ux, uy = -ux, -uy
        side = neg
        length = float(-proj[neg].min())
    else:
        side = pos
        length = float(proj[pos].max())

    cx = float(px[side].mean())
    cy = float(py[side].mean())
    angle = math.atan2(-cy, cx)  # y axis points down in image coordinates
    return NeedleFix(angle=angle, length=length, votes=line.votes, line=line)


def _unwrap_to_sweep(angle: float, cal: GaugeCalibration) -> float:
    """Place the measured angle on the gauge's sweep interval, splitting the
    dead zone between the two scale ends."""
    lo = min(cal.x_min, cal.x_max)
    hi = max(cal.x_min, cal.x_max)
    gap = 2 * math.pi - (hi - lo)
    anchor = lo - gap / 2
    return anchor + ((angle - anchor) % (2 * math.pi))


def read_circular_gauge(
    roi: ImageBuffer,
    cal: GaugeCalibration,
    pre: PreprocessParams | None = None,
    hp: HoughParams | None = None,
) -> Reading:
    if cal.pivot is None:
        raise ConfigError(["circular gauge calibration requires a pivot point"])
    pre = pre or PreprocessParams()
    hp = hp or HoughParams()
    binary = preprocess(roi, pre)
    fix = find_needle(binary, cal.pivot, hp)
    if fix is None:
        return not_found(ReadingKind.CIRCULAR_GAUGE)
    x = _unwrap_to_sweep(fix.angle, cal)
    value = map_needle_to_scale(x, cal)
    return reading(ReadingKind.CIRCULAR_GAUGE, value, fix.confidence)


def read_linear_gauge(
    roi: ImageBuffer,
    cal: GaugeCalibration,
    pre: PreprocessParams | None = None,
    hp: HoughParams | None = None,
    max_tilt_deg: float = 15.0,
) -> Reading:
    if cal.axis not in ("horizontal", "vertical"):
        raise ConfigError(["linear gauge calibration requires an axis"])
    pre = pre or PreprocessParams()
    hp = hp or HoughParams()
    binary = preprocess(roi, pre)
    lines = hough_lines(binary, hp.rho_res, hp.theta_res, hp.vote_threshold)

    # needle must be within max_tilt of perpendicular to the travel axis;
    # for a horizontal axis that means a near-vertical line (normal near 0)
    target = 0.0 if cal.axis == "horizontal" else math.pi / 2
    tol = math.radians(max_tilt_deg)

    def tilt(theta: float) -> float:
        d = abs(theta - target) % math.pi
        return min(d, math.pi - d)

    line = next((l for l in lines if tilt(l.theta) <= tol), None)
    if line is None:
        return not_found(ReadingKind.LINEAR_GAUGE)

    if cal.axis == "horizontal":
        mid = binary.height / 2.0
        coord = (line.rho - mid * math.sin(line.theta)) / math.cos(line.theta)
    else:
        mid = binary.width / 2.0
        coord = (line.rho - mid * math.cos(line.theta)) / math.sin(line.theta)
    # refine with the centroid of foreground pixels on the line
    ys, xs = np.nonzero(binary.data)
    dist = np.abs(
        xs * math.cos(line.theta) + ys * math.sin(line.theta) - line.rho
    )
    on_line = dist <= _REFINE_BAND
    if on_line.any():
        coord = float((xs if cal.axis == "horizontal" else ys)[on_line].mean())
        extent = _span(ys[on_line] if cal.axis == "horizontal" else xs[on_line])
    else:
        extent = 0.0
    value = map_needle_to_scale(coord, cal)
    confidence = min(1.0, line.votes / extent) if extent > 0 else 0.0
    return reading(ReadingKind.LINEAR_GAUGE, value, confidence)


def _span(vals: np.ndarray) -> float:
    return float(vals.max() - vals.min() + 1)


def read_knob(
    roi: ImageBuffer,
    cal: GaugeCalibration,
    detents: list[tuple[str, float]],
    pre: PreprocessParams | None = None,
    hp: HoughParams | None = None,
) -> Reading:
    """Knob pointer angle snapped to the nearest labeled detent."""
    if not detents:
        raise ConfigError(["knob requires at least one detent"])
    angles = [a for _, a in detents]
    if len(set(angles)) != len(angles):
        raise ConfigError(["knob detent angles must be distinct"])
    if cal.pivot is None:
        raise ConfigError(["knob calibration requires a pivot point"])
    pre = pre or PreprocessParams()
    hp = hp or HoughParams()
    binary = preprocess(roi, pre)
    fix = find_needle(binary, cal.pivot, hp)
    if fix is None:
        return not_found(ReadingKind.KNOB)

    def wrapped(a: float, b: float) -> float:
        d = abs(a - b) % (2 * math.pi)
        return min(d, 2 * math.pi - d)

    dists = [wrapped(fix.angle, a) for a in angles]
    best = min(range(len(detents)), key=lambda i: dists[i])  # ties: first in list
    if len(detents) == 1:
        gap = 2 * math.pi
    else:
        gap = min(
            wrapped(angles[i], angles[j])
            for i in range(len(angles))
            for j in range(i + 1, len(angles))
        )
    confidence = max(0.0, min(1.0, 1.0 - dists[best] / (gap / 2.0)))
    return reading(ReadingKind.KNOB, detents[best][0], confidence)
