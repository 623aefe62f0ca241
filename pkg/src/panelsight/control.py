"""Operator control surface: a running station wrapped in an HTTP API for
frame snapshots, side-effect-free reader previews, atomic config swap, and
stats — the backend the calibration UI talks to."""

from __future__ import annotations

import base64
import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .adapter import AdapterServer
from .errors import ConfigError, PanelSightError, SpecError
from .imaging import ImageBuffer, crop_roi, encode_png, threshold, to_grayscale
from .mockpanel import PanelSpec, render_panel
from .pipeline import (
    ArtifactConfig,
    StationConfig,
    compile_artifact,
    compile_station,
    load_station_config,
    reading_to_json,
    run_station,
)
from .pipeline.runner import StationStats, correct_frame
from .readers import Reading
from .readers.gauge import preprocess
from .readers.types import PreprocessParams


class StationRuntime:
    """Owns the station loop and the latest corrected frame/readings.

    Config swap follows read-copy-update: a PUT either fully replaces the
    running config (and restarts the loop) or leaves it untouched.
    """

    def __init__(
        self,
        config_path: str | Path,
        adapter: Optional[AdapterServer] = None,
        realtime: bool = True,
        loop_source: bool = True,
    ):
        self.config_path = Path(config_path)
        self._adapter = adapter
        self._realtime = realtime
        self._loop_source = loop_source
        self._lock = threading.Lock()
        self._doc = self.config_path.read_bytes()
        self._cfg = load_station_config(self._doc)
        self._latest_frame: Optional[ImageBuffer] = None
        self._last_readings: dict[str, Reading] = {}
        self._stats = StationStats()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name="station-loop", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread:
            self._thread.join(timeout=10.0)

    def _run(self) -> None:
        while not self._stop.is_set():
            with self._lock:
                cfg = self._cfg
            stats = run_station(
                cfg,
                self._sink,
                stop=self._stop,
                realtime=self._realtime,
                tick_hook=self._on_tick,
            )
            with self._lock:
                self._stats.frames += stats.frames
                self._stats.drops += stats.drops
                self._stats.readings += stats.readings
                self._stats.latencies_ms.extend(stats.latencies_ms[-500:])
            if not self._loop_source:
                break

    def _sink(self, r: Reading) -> None:
        if self._adapter is not None:
            self._adapter.publish_reading(r)

    def _on_tick(self, corrected: ImageBuffer, readings: list[Reading]) -> None:
        with self._lock:
            self._latest_frame = corrected
            for r in readings:
                self._last_readings[r.artifact_id] = r

    # -- API helpers -------------------------------------------------------

    @property
    def config(self) -> StationConfig:
        with self._lock:
            return self._cfg

    def config_document(self) -> bytes:
        with self._lock:
            return self._doc

    def swap_config(self, document: bytes) -> None:
        """Validate, persist, and apply a whole new config atomically."""
        cfg = load_station_config(document)  # raises ConfigError, nothing applied
        tmp = self.config_path.with_suffix(".tmp")
        tmp.write_bytes(document)
        tmp.replace(self.config_path)
        was_running = self._thread is not None and self._thread.is_alive()
        if was_running:
            self.stop()
        with self._lock:
            self._cfg = cfg
            self._doc = document
            self._last_readings.clear()
        if was_running:
            self.start()

    def latest_frame(self) -> Optional[ImageBuffer]:
        with self._lock:
            return self._latest_frame

    def stats_document(self) -> dict:
        with self._lock:
            doc = self._stats.summary()
            doc["last_readings"] = {
                artifact_id: json.loads(reading_to_json(r))
                for artifact_id, r in sorted(self._last_readings.items())
            }
        return doc


class PreviewRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    source: Literal["latest", "mock"] = "latest"
    panel: Optional[dict] = None  # panel spec document when source == "mock"
    artifact: dict  # candidate artifact config document
    include_images: bool = False


def _preview_images(roi: ImageBuffer, artifact: ArtifactConfig) -> dict[str, str]:
    """Intermediate tuning views: grayscale ROI plus, where the kind uses a
    binarization step, the post-threshold mask."""
    images = {"roi": base64.b64encode(encode_png(roi)).decode("ascii")}
    p = artifact.params
    if artifact.kind in ("circular_gauge", "linear_gauge", "knob"):
        pre = PreprocessParams(
            blur_kernel=p.get("blur_kernel", 3),
            blur_sigma=p.get("blur_sigma", 1.0),
            threshold=p.get("threshold", 90),
            invert=p.get("invert", True),
        )
        images["mask"] = base64.b64encode(encode_png(preprocess(roi, pre))).decode("ascii")
    elif artifact.kind == "seven_segment":
        gray = to_grayscale(roi)
        mode = "binary-inverted" if p.get("invert", False) else "binary"
        mask = threshold(gray, p.get("threshold", 110), mode)
        images["mask"] = base64.b64encode(encode_png(mask)).decode("ascii")
    return images


def _error_response(status: int, errors: list[str]) -> JSONResponse:
    return JSONResponse(status_code=status, content={"errors": errors})


def create_control_app(
    runtime: StationRuntime, static_dir: Optional[str | Path] = None
) -> FastAPI:
    app = FastAPI(title="panelsight control")
    app.state.runtime = runtime
    app.state.preview_requests = 0

    @app.get("/api/frame")
    def get_frame():
        frame = runtime.latest_frame()
        if frame is None:
            return _error_response(404, ["no frame processed yet"])
        return Response(content=encode_png(frame), media_type="image/png")

    @app.get("/api/config")
    def get_config():
        return Response(content=runtime.config_document(), media_type="application/json")

    @app.put("/api/config")
    async def put_config(request: Request):
        # the raw bytes are stored verbatim so GET returns exactly what was
        # saved (byte-identical reload round-trip)
        document = await request.body()
        try:
            runtime.swap_config(document)
        except ConfigError as exc:
            return _error_response(400, exc.errors)
        return {"ok": True}

    @app.get("/api/stats")
    def get_stats():
        doc = runtime.stats_document()
        doc["preview_requests"] = app.state.preview_requests
        return doc

    @app.post("/api/preview")
    def preview(req: PreviewRequest):
        app.state.preview_requests += 1
        try:
            artifact = ArtifactConfig.model_validate(req.artifact)
        except ValidationError as exc:
            return _error_response(
                400, [f"artifact.{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()]
            )
        try:
            compiled = compile_artifact(artifact)
        except ConfigError as exc:
            return _error_response(400, [f"artifact.{m}" for m in exc.errors])

        if req.source == "mock":
            if req.panel is None:
                return _error_response(400, ["panel: required when source is 'mock'"])
            try:
                spec = PanelSpec.model_validate(req.panel)
                frame, _truth = render_panel(spec)
            except (ValidationError, SpecError) as exc:
                return _error_response(400, [f"panel: {exc}"])
        else:
            frame = runtime.latest_frame()
            if frame is None:
                return _error_response(404, ["no frame processed yet"])

        box = compiled.roi
        if box.x < 0 or box.y < 0 or box.x2 > frame.width or box.y2 > frame.height:
            return _error_response(
                400, [f"artifact.roi: outside the {frame.width}x{frame.height} frame"]
            )
        roi = crop_roi(frame, box)
        reading = compiled.safe_read(roi).stamped(
            compiled.artifact_id,
            compiled.units,
            datetime.now(timezone.utc),
            runtime.config.station_id,
        )
        out = {"reading": json.loads(reading_to_json(reading))}
        if reading.detail is not None:
            out["detail"] = reading.detail
        if req.include_images:
            out["images"] = _preview_images(roi, artifact)
        return out

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
