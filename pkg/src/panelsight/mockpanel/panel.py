"""Panel composition: place artifact patches, add noise/glare, apply tilt."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..errors import SpecError
from ..imaging import Box, Homography, ImageBuffer, Point2, homography_from_points, warp_perspective
from . import artifacts
from .artifacts import to_image

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)

_RENDERERS = {
    "circular_gauge": artifacts.render_circular_gauge,
    "linear_gauge": artifacts.render_linear_gauge,
    "seven_segment": artifacts.render_seven_segment,
    "knob": artifacts.render_knob,
    "toggle": artifacts.render_toggle,
    "safety_light": artifacts.render_safety_light,
    "liquid_level": artifacts.render_liquid_vessel,
    "fixture_state": artifacts.render_fixture_bed,
    "part_quality": artifacts.render_part,
}


class BoxSpec(BaseModel):
    x: int
    y: int
    w: int = Field(ge=1)
    h: int = Field(ge=1)

    def to_box(self) -> Box:
        return Box(self.x, self.y, self.w, self.h)


class ArtifactSpec(BaseModel):
    artifact_id: str = Field(min_length=1)
    kind: Literal[
        "circular_gauge",
        "linear_gauge",
        "seven_segment",
        "knob",
        "toggle",
        "safety_light",
        "liquid_level",
        "fixture_state",
        "part_quality",
    ]
    box: BoxSpec
    state: Union[float, str, dict, None] = None
    style: dict = Field(default_factory=dict)


class GlareSpec(BaseModel):
    cx: float
    cy: float
    rx: float = Field(gt=0)
    ry: float = Field(gt=0)
    intensity: float = Field(ge=0, le=255)


class NoiseSpec(BaseModel):
    gaussian_sigma: float = Field(default=0.0, ge=0)
    glare: Optional[GlareSpec] = None


class TiltSpec(BaseModel):
    yaw_deg: float = 0.0
    pitch_deg: float = 0.0


class PanelSpec(BaseModel):
    width: int = Field(ge=16)
    height: int = Field(ge=16)
    background: tuple[int, int, int] = (200, 201, 205)
    artifacts: list[ArtifactSpec] = Field(default_factory=list)
    noise: Optional[NoiseSpec] = None
    tilt: Optional[TiltSpec] = None
    seed: int = 0


@dataclass(frozen=True)
class GroundTruth:
    """Per-artifact true states plus the correction for any applied tilt."""

    states: dict
    tilt_correction: Homography | None
    panel_corners: list[Point2] | None  # canvas corner positions in the tilted frame
    seed: int

    def to_json_dict(self) -> dict:
        out = {"states": self.states, "seed": self.seed}
        if self.tilt_correction is not None:
            out["tilt_correction"] = [list(row) for row in self.tilt_correction.m]
            out["panel_corners"] = [{"x": p.x, "y": p.y} for p in self.panel_corners]
        return out


def load_panel_spec(path: str | Path) -> PanelSpec:
    try:
        return PanelSpec.model_validate_json(Path(path).read_text())
    except ValidationError as exc:
        raise SpecError(str(exc)) from exc


def _validate_placements(spec: PanelSpec) -> None:
    problems = []
    boxes = []
    for art in spec.artifacts:
        box = art.box.to_box()
        if box.x < 0 or box.y < 0 or box.x2 > spec.width or box.y2 > spec.height:
            problems.append(f"{art.artifact_id}: placement outside canvas")
        boxes.append((art.artifact_id, box))
    ids = [a.artifact_id for a in spec.artifacts]
    if len(set(ids)) != len(ids):
        problems.append("artifact ids must be unique")
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            a_id, a = boxes[i]
            b_id, b = boxes[j]
            if a.x < b.x2 and b.x < a.x2 and a.y < b.y2 and b.y < a.y2:
                problems.append(f"placements overlap: {a_id} and {b_id}")
    if spec.tilt and (abs(spec.tilt.yaw_deg) > 45 or abs(spec.tilt.pitch_deg) > 45):
        problems.append("tilt must be at most 45 degrees")
    if problems:
        raise SpecError("; ".join(problems))


def tilt_homography(width: int, height: int, yaw_deg: float, pitch_deg: float) -> Homography:
    """Projective map of the panel plane under a rotated camera, scaled to
    keep the whole panel inside the original canvas."""
    yaw = math.radians(yaw_deg)
    pitch = math.radians(pitch_deg)
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    dist = 1.8 * max(width, height)
    corners = [Point2(0, 0), Point2(width, 0), Point2(width, height), Point2(0, height)]
    projected = []
    for c in corners:
        x, y = c.x - width / 2.0, c.y - height / 2.0
        # rotate about the vertical axis (yaw), then the horizontal one (pitch)
        x1, z1 = x * cy, -x * sy
        y2 = y * cp - z1 * sp
        z2 = y * sp + z1 * cp
        scale = dist / (dist + z2)
        projected.append((x1 * scale, y2 * scale))
    xs = [p[0] for p in projected]
    ys = [p[1] for p in projected]
    span_x = max(xs) - min(xs)
    span_y = max(ys) - min(ys)
    fit = 1.0
    if span_x > width:
        fit = min(fit, width / span_x)
    if span_y > height:
        fit = min(fit, height / span_y)
    # center the fitted quad's bounding box inside the canvas
    off_x = (width - fit * span_x) / 2.0 - fit * min(xs)
    off_y = (height - fit * span_y) / 2.0 - fit * min(ys)
    dst = [Point2(p[0] * fit + off_x, p[1] * fit + off_y) for p in projected]
    return homography_from_points(corners, dst)


def render_panel(spec: PanelSpec, timestamp: datetime | None = None) -> tuple[ImageBuffer, GroundTruth]:
    """Deterministic render of every artifact at its ground-truth state."""
    _validate_placements(spec)
    canvas = np.empty((spec.height, spec.width, 3), dtype=np.float64)
    canvas[...] = spec.background

    states = {}
    for art in spec.artifacts:
        renderer = _RENDERERS[art.kind]
        box = art.box.to_box()
        patch = renderer(box.w, box.h, art.state, dict(art.style))
        canvas[box.y : box.y2, box.x : box.x2] = patch
        states[art.artifact_id] = art.state

    rng = np.random.default_rng(spec.seed)
    if spec.noise:
        if spec.noise.gaussian_sigma > 0:
            canvas += rng.normal(0.0, spec.noise.gaussian_sigma, canvas.shape)
        if spec.noise.glare:
            g = spec.noise.glare
            ys, xs = np.mgrid[0 : spec.height, 0 : spec.width]
            d2 = ((xs - g.cx) / g.rx) ** 2 + ((ys - g.cy) / g.ry) ** 2
            canvas += (g.intensity * np.exp(-d2))[:, :, None]

    frame = to_image(canvas)
    correction = None
    panel_corners = None
    if spec.tilt and (spec.tilt.yaw_deg or spec.tilt.pitch_deg):
        h_tilt = tilt_homography(spec.width, spec.height, spec.tilt.yaw_deg, spec.tilt.pitch_deg)
        frame = warp_perspective(frame, h_tilt, spec.width, spec.height)
        correction = h_tilt.inverse()
        panel_corners = [
            h_tilt.apply(p)
            for p in (
                Point2(0, 0),
                Point2(spec.width, 0),
                Point2(spec.width, spec.height),
                Point2(0, spec.height),
            )
        ]
    return frame, GroundTruth(
        states=states, tilt_correction=correction, panel_corners=panel_corners, seed=spec.seed
    )


def render_sequence(
    specs: list[PanelSpec], fps: int, epoch: datetime = EPOCH
) -> list[tuple[ImageBuffer, GroundTruth, datetime]]:
    """Frames timestamped at 1/fps intervals from a fixed epoch."""
    if fps < 1:
        raise SpecError(f"fps must be >= 1, got {fps}")
    out = []
    for i, spec in enumerate(specs):
        ts = epoch + timedelta(milliseconds=round(i * 1000.0 / fps))
        frame, truth = render_panel(spec, ts)
        out.append((frame, truth, ts))
    return out


def sequence_specs(base: PanelSpec, state_frames: list[dict]) -> list[PanelSpec]:
    """Expand per-frame state overrides ({artifact_id: state}) into full specs."""
    specs = []
    for overrides in state_frames:
        spec = base.model_copy(deep=True)
        unknown = set(overrides) - {a.artifact_id for a in spec.artifacts}
        if unknown:
            raise SpecError(f"state override for unknown artifact ids: {sorted(unknown)}")
        for art in spec.artifacts:
            if art.artifact_id in overrides:
                art.state = overrides[art.artifact_id]
        specs.append(spec)
    return specs
