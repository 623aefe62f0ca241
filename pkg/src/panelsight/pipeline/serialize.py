"""Wire serialization of readings: single-line JSON with a fixed key order."""

from __future__ import annotations

import json
from datetime import datetime, timezone

from ..readers import Reading, ReadingKind

_KEYS = ("station_id", "artifact_id", "kind", "value", "units", "timestamp", "confidence")


def format_timestamp(ts: datetime) -> str:
    """ISO-8601 UTC with exactly millisecond precision and a 'Z' suffix."""
    ts = ts.astimezone(timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%S") + f".{ts.microsecond // 1000:03d}Z"


def parse_timestamp(text: str) -> datetime:
    if not text.endswith("Z"):
        raise ValueError(f"timestamp must end with 'Z': {text!r}")
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%S.%fZ").replace(tzinfo=timezone.utc)


def reading_to_json(r: Reading) -> bytes:
    doc = {
        "station_id": r.station_id,
        "artifact_id": r.artifact_id,
        "kind": r.kind.value,
        "value": r.value,
        "units": r.units,
        "timestamp": format_timestamp(r.timestamp),
        "confidence": r.confidence,
    }
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def parse_reading_json(line: bytes | str) -> Reading:
    doc = json.loads(line)
    missing = [k for k in _KEYS if k not in doc]
    if missing:
        raise ValueError(f"reading document missing keys: {missing}")
    return Reading(
        artifact_id=doc["artifact_id"],
        kind=ReadingKind(doc["kind"]),
        value=doc["value"],
        units=doc["units"],
        timestamp=parse_timestamp(doc["timestamp"]),
        confidence=doc["confidence"],
        station_id=doc["station_id"],
    )
