"""Compile artifact configs into ready-to-run reader closures.

Base64 templates are decoded and parameter objects constructed once at
compile time so the per-frame path does no parsing.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass
from typing import Callable

from ..errors import ConfigError, PanelSightError
from ..imaging import Box, Homography, ImageBuffer, Point2, decode_png
from ..readers import (
    FixtureSpec,
    GaugeCalibration,
    HoughParams,
    LightZone,
    PreprocessParams,
    Reading,
    ReadingKind,
    SegmentTemplate,
    SevenSegmentParams,
    not_found,
    read_circular_gauge,
    read_fixture_state,
    read_knob,
    read_linear_gauge,
    read_liquid_level,
    read_part_quality,
    read_safety_light,
    read_seven_segment,
    read_toggle,
)
from .config import ArtifactConfig, StationConfig, validate_artifact_params


def _decode_template(b64: str, where: str) -> ImageBuffer:
    try:
        return decode_png(base64.b64decode(b64, validate=True))
    except (binascii.Error, PanelSightError, ValueError) as exc:
        raise ConfigError([f"{where}: invalid base64 PNG template ({exc})"]) from exc


def _needle_args(p):
    pre = PreprocessParams(
        blur_kernel=p.blur_kernel,
        blur_sigma=p.blur_sigma,
        threshold=p.threshold,
        invert=p.invert,
    )
    hough = HoughParams(
        vote_threshold=p.vote_threshold,
        pivot_radius=getattr(p, "pivot_radius", 8.0),
    )
    return pre, hough


def _build_reader(cfg: ArtifactConfig) -> Callable[[ImageBuffer], Reading]:
    p = validate_artifact_params(cfg.kind, cfg.params)
    kind = cfg.kind

    if kind in ("circular_gauge", "linear_gauge"):
        cal = GaugeCalibration(
            x_min=p.x_min,
            x_max=p.x_max,
            y_min=p.y_min,
            y_max=p.y_max,
            pivot=p.pivot.to_point() if kind == "circular_gauge" else None,
            axis=p.axis if kind == "linear_gauge" else None,
            direction=p.direction,
        )
        pre, hough = _needle_args(p)
        fn = read_circular_gauge if kind == "circular_gauge" else read_linear_gauge
        return lambda roi: fn(roi, cal, pre, hough)

    if kind == "seven_segment":
        seg = SevenSegmentParams(threshold=p.threshold, invert=p.invert)
        tmpl = SegmentTemplate(lit_fraction=p.lit_fraction)
        n = p.digit_count
        return lambda roi: read_seven_segment(roi, n, tmpl=tmpl, params=seg)

    if kind == "knob":
        cal = GaugeCalibration(
            x_min=0.0, x_max=1.0, y_min=0.0, y_max=1.0, pivot=p.pivot.to_point()
        )
        pre, hough = _needle_args(p)
        detents = [(d.label, d.angle) for d in p.detents]
        return lambda roi: read_knob(roi, cal, detents, pre, hough)

    if kind == "toggle":
        states = [
            (s.label, _decode_template(s.image_b64, f"states[{i}]"))
            for i, s in enumerate(p.states)
        ]
        return lambda roi: read_toggle(roi, states)

    if kind == "safety_light":
        zones = [LightZone(z.color, z.box.to_box()) for z in p.zones]
        thr = p.lit_threshold
        return lambda roi: read_safety_light(roi, zones, lit_threshold=thr)

    if kind == "liquid_level":
        tmpl = _decode_template(p.template_b64, "template_b64")
        col = p.search_column.to_box()
        return lambda roi: read_liquid_level(
            roi, tmpl, p.zero_reference, p.scale, col, reject_score=p.reject_score
        )

    if kind == "fixture_state":
        specs = [
            FixtureSpec(
                f.fixture_id, f.box.to_box(), _decode_template(f.template_b64, f.fixture_id)
            )
            for f in p.fixtures
        ]
        return lambda roi: read_fixture_state(
            roi,
            specs,
            misalign_score=p.misalign_score,
            search_margin=p.search_margin,
            center_tolerance=p.center_tolerance,
        )

    if kind == "part_quality":
        tmpl = _decode_template(p.template_b64, "template_b64")
        return lambda roi: read_part_quality(
            roi,
            tmpl,
            reject_score=p.reject_score,
            presence_threshold=p.presence_threshold,
            presence_binarize=p.presence_binarize,
            presence_invert=p.presence_invert,
        )

    raise ConfigError([f"unknown artifact kind {kind!r}"])


@dataclass(frozen=True)
class CompiledArtifact:
    artifact_id: str
    kind: ReadingKind
    roi: Box
    units: str
    sample_divisor: int
    read: Callable[[ImageBuffer], Reading]

    def safe_read(self, roi_img: ImageBuffer) -> Reading:
        """A reader failure yields a not-found reading, never an exception."""
        try:
            return self.read(roi_img)
        except Exception:
            return not_found(self.kind)


def compile_artifact(cfg: ArtifactConfig) -> CompiledArtifact:
    return CompiledArtifact(
        artifact_id=cfg.artifact_id,
        kind=ReadingKind(cfg.kind),
        roi=cfg.roi.to_box(),
        units=cfg.units,
        sample_divisor=cfg.sample_divisor,
        read=_build_reader(cfg),
    )


@dataclass(frozen=True)
class CompiledStation:
    station_id: str
    width: int
    height: int
    homography: Homography | None  # None when the perspective is identity
    artifacts: tuple[CompiledArtifact, ...]


def compile_station(cfg: StationConfig) -> CompiledStation:
    persp = cfg.perspective
    return CompiledStation(
        station_id=cfg.station_id,
        width=persp.width,
        height=persp.height,
        homography=None if persp.is_identity() else persp.homography(),
        artifacts=tuple(compile_artifact(a) for a in cfg.artifacts),
    )
