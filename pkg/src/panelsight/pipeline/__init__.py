"""Station runtime: config loading, per-frame reading fan-out, JSON output."""

from .config import (
    ArtifactConfig,
    BoxModel,
    DirectorySource,
    MockSource,
    PerspectiveModel,
    PointModel,
    StationConfig,
    load_station_config,
    validate_artifact_params,
)
from .dispatch import CompiledArtifact, CompiledStation, compile_artifact, compile_station
from .runner import StationStats, run_station, run_tick
from .serialize import (
    format_timestamp,
    parse_reading_json,
    parse_timestamp,
    reading_to_json,
)
from .sources import DirectoryFrames, MockFrames, open_frame_source

__all__ = [
    "StationConfig",
    "ArtifactConfig",
    "PerspectiveModel",
    "PointModel",
    "BoxModel",
    "DirectorySource",
    "MockSource",
    "load_station_config",
    "validate_artifact_params",
    "CompiledArtifact",
    "CompiledStation",
    "compile_artifact",
    "compile_station",
    "run_tick",
    "run_station",
    "StationStats",
    "reading_to_json",
    "parse_reading_json",
    "format_timestamp",
    "parse_timestamp",
    "DirectoryFrames",
    "MockFrames",
    "open_frame_source",
]
