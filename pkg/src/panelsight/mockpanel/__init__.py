"""Deterministic mock-panel renderer: the ground-truth oracle for readers."""

from .artifacts import (
    DEFAULT_DETENTS,
    FIXTURE_IDS,
    GAUGE_X_MAX,
    GAUGE_X_MIN,
    LIGHT_SEQUENCE,
    LIGHT_STATES,
    PART_STATES,
    TOGGLE_LABELS,
    fixture_layout,
    liquid_geometry,
    liquid_surface_row,
    pipeline_params,
    to_image,
)
from .panel import (
    EPOCH,
    ArtifactSpec,
    BoxSpec,
    GlareSpec,
    GroundTruth,
    NoiseSpec,
    PanelSpec,
    TiltSpec,
    load_panel_spec,
    render_panel,
    render_sequence,
    sequence_specs,
    tilt_homography,
)

__all__ = [
    "PanelSpec",
    "ArtifactSpec",
    "BoxSpec",
    "NoiseSpec",
    "GlareSpec",
    "TiltSpec",
    "GroundTruth",
    "EPOCH",
    "render_panel",
    "render_sequence",
    "sequence_specs",
    "load_panel_spec",
    "tilt_homography",
    "pipeline_params",
    "to_image",
    "fixture_layout",
    "liquid_geometry",
    "liquid_surface_row",
    "GAUGE_X_MIN",
    "GAUGE_X_MAX",
    "DEFAULT_DETENTS",
    "TOGGLE_LABELS",
    "LIGHT_SEQUENCE",
    "LIGHT_STATES",
    "PART_STATES",
    "FIXTURE_IDS",
]
