"""Station configuration schema and all-errors-at-once validation."""

from __future__ import annotations

import json
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ConfigError, GeometryError
from ..imaging import Box, Homography, Point2, homography_from_points


class PointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: float
    y: float

    def to_point(self) -> Point2:
        return Point2(self.x, self.y)


class BoxModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x: int
    y: int
    w: int = Field(ge=1)
    h: int = Field(ge=1)

    def to_box(self) -> Box:
        return Box(self.x, self.y, self.w, self.h)


class PerspectiveModel(BaseModel):
    """Four source points mapped onto a width x height output rectangle."""

    model_config = ConfigDict(extra="forbid")
    src: list[PointModel] = Field(min_length=4, max_length=4)
    width: int = Field(ge=1)
    height: int = Field(ge=1)

    def output_corners(self) -> list[Point2]:
        return [
            Point2(0, 0),
            Point2(self.width, 0),
            Point2(self.width, self.height),
            Point2(0, self.height),
        ]

    def is_identity(self) -> bool:
        return all(
            abs(p.x - c.x) < 1e-9 and abs(p.y - c.y) < 1e-9
            for p, c in zip(self.src, self.output_corners())
        )

    def homography(self) -> Homography:
        return homography_from_points([p.to_point() for p in self.src], self.output_corners())


class DirectorySource(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["directory"]
    path: str
    fps: int = Field(default=30, ge=1)


class MockSource(BaseModel):
    """Renders a panel document: either a single panel spec (repeated
    ``frame_count`` times) or {"base": <panel spec>, "frames": [overrides]}."""

    model_config = ConfigDict(extra="forbid")
    type: Literal["mock"]
    path: str
    fps: int = Field(default=30, ge=1)
    frame_count: int = Field(default=1, ge=1)


FrameSource = Annotated[Union[DirectorySource, MockSource], Field(discriminator="type")]

ARTIFACT_KINDS = (
    "circular_gauge",
    "linear_gauge",
    "seven_segment",
    "knob",
    "toggle",
    "safety_light",
    "liquid_level",
    "fixture_state",
    "part_quality",
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _NeedleParams(_Strict):
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    direction: Literal[1, -1] = 1
    blur_kernel: int = Field(default=3, ge=1)
    blur_sigma: float = Field(default=1.0, gt=0)
    threshold: int = Field(default=90, ge=0, le=255)
    invert: bool = True
    vote_threshold: int = Field(default=12, ge=1)


class CircularGaugeParams(_NeedleParams):
    pivot: PointModel
    pivot_radius: float = Field(default=6.0, gt=0)


class LinearGaugeParams(_NeedleParams):
    axis: Literal["horizontal", "vertical"] = "horizontal"
    vote_threshold: int = Field(default=10, ge=1)


class SevenSegmentParamsModel(_Strict):
    digit_count: int = Field(ge=1)
    threshold: int = Field(default=110, ge=0, le=255)
    invert: bool = False
    lit_fraction: float = Field(default=0.5, gt=0, le=1)


class DetentModel(_Strict):
    label: str = Field(min_length=1)
    angle: float


class KnobParams(_Strict):
    pivot: PointModel
    detents: list[DetentModel] = Field(min_length=1)
    blur_kernel: int = Field(default=3, ge=1)
    blur_sigma: float = Field(default=1.0, gt=0)
    threshold: int = Field(default=200, ge=0, le=255)
    invert: bool = False
    vote_threshold: int = Field(default=8, ge=1)
    pivot_radius: float = Field(default=6.0, gt=0)


class ToggleStateModel(_Strict):
    label: str = Field(min_length=1)
    image_b64: str


class ToggleParams(_Strict):
    states: list[ToggleStateModel] = Field(min_length=2)


class LightZoneModel(_Strict):
    color: Literal["red", "yellow", "green"]
    box: BoxModel


class SafetyLightParams(_Strict):
    zones: list[LightZoneModel] = Field(min_length=1)
    lit_threshold: float = Field(default=120.0, ge=0, le=255)


class LiquidLevelParams(_Strict):
    template_b64: str
    zero_reference: float
    scale: float
    search_column: BoxModel
    reject_score: float = Field(default=0.15, gt=0)


class FixtureModel(_Strict):
    fixture_id: str = Field(min_length=1)
    box: BoxModel
    template_b64: str


class FixtureStateParams(_Strict):
    fixtures: list[FixtureModel]
    misalign_score: float = Field(default=0.02, gt=0)
    search_margin: float = Field(default=0.25, ge=0)
    center_tolerance: float = Field(default=4.0, ge=0)


class PartQualityParams(_Strict):
    template_b64: str
    reject_score: float = Field(default=0.01, gt=0)
    presence_threshold: float = Field(default=0.02, ge=0, le=1)
    presence_binarize: int = Field(default=128, ge=0, le=255)
    presence_invert: bool = True


PARAM_MODELS: dict[str, type[BaseModel]] = {
    "circular_gauge": CircularGaugeParams,
    "linear_gauge": LinearGaugeParams,
    "seven_segment": SevenSegmentParamsModel,
    "knob": KnobParams,
    "toggle": ToggleParams,
    "safety_light": SafetyLightParams,
    "liquid_level": LiquidLevelParams,
    "fixture_state": FixtureStateParams,
    "part_quality": PartQualityParams,
}


class ArtifactConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    artifact_id: str = Field(min_length=1)
    kind: Literal[ARTIFACT_KINDS]  # type: ignore[valid-type]
    roi: BoxModel
    units: str = ""
    sample_divisor: int = Field(default=1, ge=1)
    params: dict = Field(default_factory=dict)


class StationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    schema_version: Literal[1]
    station_id: str = Field(min_length=1)
    frame_source: FrameSource
    perspective: PerspectiveModel
    artifacts: list[ArtifactConfig] = Field(default_factory=list)


def validate_artifact_params(kind: str, params: dict) -> BaseModel:
    """Parse and validate a per-kind reader parameter document."""
    model = PARAM_MODELS.get(kind)
    if model is None:
        raise ConfigError([f"unknown artifact kind {kind!r}"])
    try:
        return model.model_validate(params)
    except ValidationError as exc:
        raise ConfigError(_pydantic_errors(exc, prefix="params")) from exc


def _pydantic_errors(exc: ValidationError, prefix: str = "") -> list[str]:
    out = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        path = f"{prefix}.{loc}" if prefix and loc else (prefix or loc)
        out.append(f"{path}: {err['msg']}")
    return out


def _cross_checks(cfg: StationConfig) -> list[str]:
    problems = []

    seen: dict[str, int] = {}
    for i, art in enumerate(cfg.artifacts):
        if art.artifact_id in seen:
            problems.append(
                f"artifacts[{seen[art.artifact_id]}] and artifacts[{i}]: "
                f"duplicate artifact_id {art.artifact_id!r}"
            )
        else:
            seen[art.artifact_id] = i

    try:
        cfg.perspective.homography()
    except GeometryError as exc:
        problems.append(f"perspective.src: {exc}")

    frame = Box(0, 0, cfg.perspective.width, cfg.perspective.height)
    for i, art in enumerate(cfg.artifacts):
        roi = art.roi.to_box()
        if roi.x < 0 or roi.y < 0 or roi.x2 > frame.x2 or roi.y2 > frame.y2:
            problems.append(
                f"artifacts[{i}].roi: outside the {frame.w}x{frame.h} corrected frame"
            )
        try:
            validate_artifact_params(art.kind, art.params)
        except ConfigError as exc:
            problems.extend(f"artifacts[{i}].{msg}" for msg in exc.errors)

    return problems


def load_station_config(document: bytes | str) -> StationConfig:
    """Parse, validate, and cross-check a station config, reporting every
    problem found rather than only the first."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"invalid JSON: {exc}"]) from exc
    try:
        cfg = StationConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_pydantic_errors(exc)) from exc
    problems = _cross_checks(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg
