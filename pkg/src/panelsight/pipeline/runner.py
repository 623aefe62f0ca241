"""Per-frame processing and the paced station loop with a freshest-frame
drop policy."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Iterable, Optional

from ..errors import PanelSightError
from ..imaging import ImageBuffer, crop_roi, warp_perspective
from ..readers import Reading
from .config import StationConfig
from .dispatch import CompiledStation, compile_station
from .sources import open_frame_source


class TickError(PanelSightError):
    """Frame incompatible with the station declaration (source fault)."""


def _percentile(sorted_vals: list[float], q: float) -> float:
    if not sorted_vals:
        return 0.0
    idx = q * (len(sorted_vals) - 1)
    lo = int(idx)
    hi = min(lo + 1, len(sorted_vals) - 1)
    return sorted_vals[lo] + (sorted_vals[hi] - sorted_vals[lo]) * (idx - lo)


@dataclass
class StationStats:
    frames: int = 0
    drops: int = 0
    readings: int = 0
    latencies_ms: list[float] = field(default_factory=list)

    @property
    def p50_ms(self) -> float:
        return _percentile(sorted(self.latencies_ms), 0.50)

    @property
    def p95_ms(self) -> float:
        return _percentile(sorted(self.latencies_ms), 0.95)

    def summary(self) -> dict:
        return {
            "frames": self.frames,
            "drops": self.drops,
            "readings": self.readings,
            "p50_ms": round(self.p50_ms, 3),
            "p95_ms": round(self.p95_ms, 3),
        }


def correct_frame(frame: ImageBuffer, station: CompiledStation) -> ImageBuffer:
    """One perspective correction per frame; identity perspectives skip the
    warp entirely (the frame must then already match the declared size)."""
    if station.homography is None:
        if frame.width != station.width or frame.height != station.height:
            raise TickError(
                f"frame is {frame.width}x{frame.height}, station declares "
                f"{station.width}x{station.height}"
            )
        return frame
    return warp_perspective(frame, station.homography, station.width, station.height)


def run_tick(
    frame: ImageBuffer,
    ts: datetime,
    cfg: StationConfig | CompiledStation,
    tick_index: int,
) -> list[Reading]:
    station = cfg if isinstance(cfg, CompiledStation) else compile_station(cfg)
    corrected = correct_frame(frame, station)
    return _tick_on_corrected(corrected, ts, station, tick_index)


def _tick_on_corrected(
    corrected: ImageBuffer, ts: datetime, station: CompiledStation, tick_index: int
) -> list[Reading]:
    readings = []
    for art in station.artifacts:
        if tick_index % art.sample_divisor != 0:
            continue
        roi = crop_roi(corrected, art.roi)
        r = art.safe_read(roi)
        readings.append(r.stamped(art.artifact_id, art.units, ts, station.station_id))
    return readings


class _LatestSlot:
    """Single-frame mailbox: a new frame replaces an unconsumed one and the
    replaced frame counts as dropped."""

    def __init__(self):
        self._cond = threading.Condition()
        self._item = None
        self._closed = False
        self.drops = 0

    def put(self, item, block: bool = False) -> None:
        """Freshest-frame by default; ``block=True`` waits for the consumer
        instead (lossless mode for offline processing)."""
        with self._cond:
            if block:
                while self._item is not None and not self._closed:
                    self._cond.wait()
            elif self._item is not None:
                self.drops += 1
            self._item = item
            self._cond.notify_all()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def take(self):
        with self._cond:
            while self._item is None and not self._closed:
                self._cond.wait()
            item, self._item = self._item, None
            self._cond.notify_all()
            return item


def run_station(
    cfg: StationConfig,
    sink: Callable[[Reading], None],
    *,
    stop: Optional[threading.Event] = None,
    realtime: bool = True,
    frames: Optional[Iterable] = None,
    tick_hook: Optional[Callable[[ImageBuffer, list[Reading]], None]] = None,
) -> StationStats:
    """Process the configured frame source until exhaustion or stop signal.

    ``realtime=True`` paces acquisition at the source fps; when a tick
    overruns the frame period the pending frame is replaced by the freshest
    one and the drop counter increments. ``frames`` overrides the config's
    source (for tests). ``tick_hook`` observes each corrected frame and its
    readings (used by the control API for snapshots).
    """
    station = compile_station(cfg)
    source = frames if frames is not None else open_frame_source(cfg.frame_source)
    fps = cfg.frame_source.fps
    period = 1.0 / fps
    stop = stop or threading.Event()
    stats = StationStats()
    slot = _LatestSlot()

    def produce():
        start = None
        try:
            for i, (frame, ts) in enumerate(source):
                if stop.is_set():
                    break
                if start is None:
                    # clock anchored to first-frame availability so source
                    # startup cost does not register as a catch-up burst
                    start = time.monotonic()
                elif realtime:
                    delay = start + i * period - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                slot.put((i, frame, ts), block=not realtime)
        finally:
            slot.close()

    producer = threading.Thread(target=produce, name="frame-producer", daemon=True)
    producer.start()

    while True:
        item = slot.take()
        if item is None:
            break
        i, frame, ts = item
        t0 = time.perf_counter()
        corrected = correct_frame(frame, station)
        readings = _tick_on_corrected(corrected, ts, station, i)
        stats.latencies_ms.append((time.perf_counter() - t0) * 1000.0)
        stats.frames += 1
        for r in readings:
            sink(r)
        stats.readings += len(readings)
        if tick_hook is not None:
            tick_hook(corrected, readings)
        if stop.is_set():
            break

    stop.set()
    producer.join(timeout=5.0)
    stats.drops = slot.drops
    return stats
