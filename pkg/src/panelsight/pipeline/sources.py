"""Frame sources: PNG directories and rendered mock panels.

Both yield (frame, timestamp) pairs at a declared fps; timestamps are
deterministic (epoch + i/fps) so replays are bit-stable.
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterator

from ..errors import ConfigError, SpecError
from ..imaging import ImageBuffer, read_png
from ..mockpanel import EPOCH, PanelSpec, render_panel, sequence_specs
from .config import DirectorySource, FrameSource, MockSource

Frame = tuple[ImageBuffer, datetime]


def _tick_ts(epoch: datetime, index: int, fps: int) -> datetime:
    return epoch + timedelta(milliseconds=round(index * 1000.0 / fps))


class DirectoryFrames:
    """Lexicographically ordered *.png files in a directory; finite."""

    def __init__(self, path: str | Path, fps: int, epoch: datetime = EPOCH):
        self.path = Path(path)
        self.fps = fps
        self.epoch = epoch
        if not self.path.is_dir():
            raise ConfigError([f"frame source directory not found: {self.path}"])
        self.files = sorted(self.path.glob("*.png"))

    def __len__(self) -> int:
        return len(self.files)

    def __iter__(self) -> Iterator[Frame]:
        for i, f in enumerate(self.files):
            yield read_png(f), _tick_ts(self.epoch, i, self.fps)


class MockFrames:
    """Frames rendered from a panel document.

    The document is either a single panel spec (repeated ``frame_count``
    times) or {"base": <panel spec>, "frames": [{artifact_id: state}, ...]}.
    """

    def __init__(
        self, path: str | Path, fps: int, frame_count: int = 1, epoch: datetime = EPOCH
    ):
        self.fps = fps
        self.epoch = epoch
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError([f"mock panel document not found: {path}"]) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError([f"invalid JSON in {path}: {exc}"]) from exc
        try:
            if isinstance(doc, dict) and "base" in doc:
                base = PanelSpec.model_validate(doc["base"])
                self.specs = sequence_specs(base, doc.get("frames", []))
            else:
                spec = PanelSpec.model_validate(doc)
                self.specs = [spec] * frame_count
        except (SpecError, ValueError) as exc:
            raise ConfigError([f"invalid panel document {path}: {exc}"]) from exc

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self) -> Iterator[Frame]:
        last_spec = None
        frame = None
        for i, spec in enumerate(self.specs):
            if spec is not last_spec:  # repeated specs render once
                frame, _truth = render_panel(spec)
                last_spec = spec
            yield frame, _tick_ts(self.epoch, i, self.fps)


def open_frame_source(src: FrameSource):
    if isinstance(src, DirectorySource):
        return DirectoryFrames(src.path, src.fps)
    if isinstance(src, MockSource):
        return MockFrames(src.path, src.fps, src.frame_count)
    raise ConfigError([f"unknown frame source type {src!r}"])
