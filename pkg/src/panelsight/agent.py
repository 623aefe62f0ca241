"""Telemetry agent: buffers adapter data lines with monotonic sequence
numbers and serves probe/current/sample over HTTP as XML."""

from __future__ import annotations

import random
import socket
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, Query, Response

from .adapter import UNAVAILABLE, DataLine, ProtocolError, unescape_field
from .pipeline.serialize import format_timestamp, parse_timestamp

DEFAULT_HTTP_PORT = 5000
DEFAULT_BUFFER_SIZE = 131072
SAMPLE_KINDS = {"circular_gauge", "linear_gauge", "liquid_level"}


@dataclass(frozen=True)
class Heartbeat:
    text: str


def parse_data_line(line: bytes | str) -> DataLine | Heartbeat:
    """Inverse of the adapter's line format; '* ...' lines are heartbeats."""
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    line = line.rstrip("\n")
    if line.startswith("* "):
        return Heartbeat(line[2:])
    fields = line.split("|")
    if len(fields) < 3 or len(fields) % 2 == 0:
        raise ProtocolError(f"data line needs timestamp plus id/value pairs: {line!r}")
    try:
        ts = parse_timestamp(fields[0])
    except ValueError as exc:
        raise ProtocolError(f"bad timestamp in data line: {fields[0]!r}") from exc
    items = tuple(
        (unescape_field(fields[i]), unescape_field(fields[i + 1]))
        for i in range(1, len(fields), 2)
    )
    return DataLine(timestamp=ts, items=items)


@dataclass(frozen=True)
class Observation:
    sequence: int
    timestamp: datetime
    data_item_id: str
    value: str


@dataclass(frozen=True)
class DataItem:
    id: str
    category: str  # SAMPLE | EVENT
    type: str
    units: str = ""


class DeviceModel:
    def __init__(self, device_name: str, items: list[DataItem]):
        ids = [i.id for i in items]
        if len(set(ids)) != len(ids):
            raise ProtocolError("data item ids must be unique")
        self.device_name = device_name
        self.items = list(items)
        self.by_id = {i.id: i for i in items}

    @classmethod
    def from_station_config(cls, cfg) -> "DeviceModel":
        items = [
            DataItem(
                id=a.artifact_id,
                category="SAMPLE" if a.kind in SAMPLE_KINDS else "EVENT",
                type=a.kind,
                units=a.units,
            )
            for a in cfg.artifacts
        ]
        return cls(cfg.station_id, items)


class ObservationBuffer:
    """Ring buffer with never-reused, strictly increasing sequence numbers.

    All items of one data line become visible atomically; readers take
    consistent snapshots under the same lock.
    """

    def __init__(self, model: DeviceModel, capacity: int = DEFAULT_BUFFER_SIZE):
        if capacity < 1:
            raise ProtocolError("buffer capacity must be >= 1")
        self.model = model
        self.capacity = capacity
        self.instance_id = random.SystemRandom().randrange(1, 2**31)
        self._lock = threading.Lock()
        self._entries: list[Observation] = []
        self._next_sequence = 1
        self.unknown_item_count = 0
        self.parse_error_count = 0

    # -- writing ---------------------------------------------------------

    def append(self, line: DataLine) -> list[Observation]:
        added = []
        with self._lock:
            for item_id, value in line.items:
                if item_id not in self.model.by_id:
                    self.unknown_item_count += 1
                    continue
                obs = Observation(self._next_sequence, line.timestamp, item_id, value)
                self._next_sequence += 1
                self._entries.append(obs)
                added.append(obs)
            if len(self._entries) > self.capacity:
                del self._entries[: len(self._entries) - self.capacity]
        return added

    def append_line(self, raw: bytes) -> None:
        try:
            parsed = parse_data_line(raw)
        except ProtocolError:
            with self._lock:
                self.parse_error_count += 1
            return
        if isinstance(parsed, DataLine):
            self.append(parsed)

    def mark_all_unavailable(self, ts: Optional[datetime] = None) -> None:
        ts = ts or datetime.now(timezone.utc)
        if self.model.items:
            self.append(
                DataLine(ts, tuple((i.id, UNAVAILABLE) for i in self.model.items))
            )

    # -- reading ---------------------------------------------------------

    @property
    def first_sequence(self) -> int:
        with self._lock:
            return self._first_locked()

    @property
    def next_sequence(self) -> int:
        with self._lock:
            return self._next_sequence

    def _first_locked(self) -> int:
        return self._entries[0].sequence if self._entries else self._next_sequence

    def snapshot(self) -> tuple[list[Observation], int, int]:
        with self._lock:
            return list(self._entries), self._first_locked(), self._next_sequence

    def current(self, at: Optional[int] = None) -> dict[str, Optional[Observation]]:
        entries, first, nxt = self.snapshot()
        if at is not None and not first <= at < nxt:
            raise SequenceOutOfRange(at, first, nxt)
        latest: dict[str, Optional[Observation]] = {i.id: None for i in self.model.items}
        for obs in entries:
            if at is not None and obs.sequence > at:
                break
            latest[obs.data_item_id] = obs
        return latest

    def sample(self, from_seq: int, count: int) -> tuple[list[Observation], int]:
        """Observations with sequence >= from_seq, ascending, at most count.

        Returns (observations, next cursor). from below the retained window
        raises; from at/above next_sequence yields an empty page.
        """
        if count < 1:
            raise ProtocolError("count must be >= 1")
        entries, first, nxt = self.snapshot()
        if from_seq >= nxt:
            return [], nxt
        if from_seq < first:
            raise SequenceOutOfRange(from_seq, first, nxt)
        start = from_seq - first
        page = entries[start : start + count]
        next_cursor = page[-1].sequence + 1 if page else nxt
        return page, next_cursor


class SequenceOutOfRange(ProtocolError):
    def __init__(self, seq: int, first: int, nxt: int):
        super().__init__(
            f"sequence {seq} outside retained range [{first}, {nxt})"
        )
        self.seq, self.first, self.next = seq, first, nxt


# -- XML rendering --------------------------------------------------------


def _header(buf: ObservationBuffer, extra: dict | None = None) -> dict:
    entries, first, nxt = buf.snapshot()
    h = {
        "creationTime": format_timestamp(datetime.now(timezone.utc)),
        "instanceId": str(buf.instance_id),
        "bufferSize": str(buf.capacity),
        "firstSequence": str(first),
        "lastSequence": str(nxt - 1),
        "nextSequence": str(nxt),
    }
    if extra:
        h.update(extra)
    return h


def _doc(tag: str, buf: ObservationBuffer, extra_header: dict | None = None) -> ET.Element:
    root = ET.Element(tag)
    ET.SubElement(root, "Header", _header(buf, extra_header))
    return root


def _serialize(root: ET.Element) -> bytes:
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def probe_xml(buf: ObservationBuffer) -> bytes:
    root = _doc("MTConnectDevices", buf)
    devices = ET.SubElement(root, "Devices")
    device = ET.SubElement(
        devices, "Device", {"name": buf.model.device_name, "id": buf.model.device_name}
    )
    items = ET.SubElement(device, "DataItems")
    for item in buf.model.items:
        attrs = {"id": item.id, "category": item.category, "type": item.type}
        if item.units:
            attrs["units"] = item.units
        ET.SubElement(items, "DataItem", attrs)
    return _serialize(root)


def _observation_element(parent: ET.Element, obs: Observation, item: DataItem) -> None:
    el = ET.SubElement(
        parent,
        "Sample" if item.category == "SAMPLE" else "Event",
        {
            "dataItemId": obs.data_item_id,
            "timestamp": format_timestamp(obs.timestamp),
            "sequence": str(obs.sequence),
        },
    )
    el.text = obs.value


def current_xml(buf: ObservationBuffer, at: Optional[int] = None) -> bytes:
    latest = buf.current(at)
    root = _doc("MTConnectStreams", buf)
    streams = ET.SubElement(root, "Streams")
    device = ET.SubElement(streams, "DeviceStream", {"name": buf.model.device_name})
    for item in buf.model.items:
        obs = latest[item.id]
        if obs is None:
            obs = Observation(0, datetime.now(timezone.utc), item.id, UNAVAILABLE)
        _observation_element(device, obs, item)
    return _serialize(root)


def sample_xml(buf: ObservationBuffer, from_seq: int, count: int) -> bytes:
    page, next_cursor = buf.sample(from_seq, count)
    root = _doc("MTConnectStreams", buf, {"nextSequence": str(next_cursor)})
    streams = ET.SubElement(root, "Streams")
    device = ET.SubElement(streams, "DeviceStream", {"name": buf.model.device_name})
    for obs in page:
        _observation_element(device, obs, buf.model.by_id[obs.data_item_id])
    return _serialize(root)


def error_xml(buf: ObservationBuffer, code: str, message: str) -> bytes:
    root = _doc("MTConnectError", buf)
    errors = ET.SubElement(root, "Errors")
    el = ET.SubElement(errors, "Error", {"errorCode": code})
    el.text = message
    return _serialize(root)


# -- HTTP app --------------------------------------------------------------


def create_agent_app(buf: ObservationBuffer, max_count: int = 10000) -> FastAPI:
    app = FastAPI(title="panelsight agent")
    app.state.buffer = buf

    def xml(content: bytes, status: int = 200) -> Response:
        return Response(content=content, media_type="text/xml", status_code=status)

    @app.get("/probe")
    def probe():
        return xml(probe_xml(buf))

    @app.get("/current")
    def current(at: Optional[int] = Query(default=None)):
        try:
            return xml(current_xml(buf, at))
        except SequenceOutOfRange as exc:
            return xml(error_xml(buf, "OUT_OF_RANGE", str(exc)), status=404)

    @app.get("/sample")
    def sample(
        from_: int = Query(alias="from", default=None),
        count: int = Query(default=100, ge=1),
    ):
        if from_ is None:
            from_ = buf.first_sequence
        if count > max_count:
            return xml(
                error_xml(buf, "TOO_MANY", f"count exceeds maximum {max_count}"),
                status=400,
            )
        try:
            return xml(sample_xml(buf, from_, count))
        except SequenceOutOfRange as exc:
            return xml(error_xml(buf, "OUT_OF_RANGE", str(exc)), status=404)

    return app


class AdapterClient:
    """Feeds the buffer from an adapter TCP stream, reconnecting with
    exponential backoff (1 s .. 30 s); data items go UNAVAILABLE while
    disconnected."""

    def __init__(
        self,
        buf: ObservationBuffer,
        host: str = "127.0.0.1",
        port: int = 7878,
        min_backoff: float = 1.0,
        max_backoff: float = 30.0,
    ):
        self.buf = buf
        self.host = host
        self.port = port
        self.min_backoff = min_backoff
        self.max_backoff = max_backoff
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, name="adapter-client", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread:
            self._thread.join(timeout=5.0)

    def _run(self) -> None:
        backoff = self.min_backoff
        connected = False
        while not self._stop.is_set():
            try:
                with socket.create_connection((self.host, self.port), timeout=5.0) as conn:
                    backoff = self.min_backoff
                    connected = True
                    conn.settimeout(0.5)
                    buf = b""
                    while not self._stop.is_set():
                        try:
                            chunk = conn.recv(4096)
                        except socket.timeout:
                            continue
                        if not chunk:
                            break
                        buf += chunk
                        while b"\n" in buf:
                            line, buf = buf.split(b"\n", 1)
                            self.buf.append_line(line + b"\n")
            except OSError:
                pass
            if self._stop.is_set():
                break
            if connected:  # mark staleness once per lost connection
                self.buf.mark_all_unavailable()
                connected = False
            self._stop.wait(backoff)
            backoff = min(backoff * 2, self.max_backoff)
