"""Telemetry adapter: readings -> pipe-delimited timestamped lines over TCP.

Wire format (one line per reading batch, newline-terminated):

    <ISO-8601 ms Z timestamp>|<id1>|<val1>[|<id2>|<val2>...]\n

'%', '|' and newline inside ids/values are escaped as %25, %7C, %0A so the
format round-trips through the agent parser for arbitrary strings.
Heartbeat: a client line "* PING\n" is answered with "* PONG <timeout_ms>\n".
"""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass
from datetime import datetime
from queue import Empty, Full, Queue

from .errors import PanelSightError
from .pipeline.serialize import format_timestamp
from .readers import Reading

UNAVAILABLE = "UNAVAILABLE"
DEFAULT_PORT = 7878
DEFAULT_HEARTBEAT_MS = 10000
BACKLOG_LIMIT = 1000


class ProtocolError(PanelSightError, ValueError):
    pass


@dataclass(frozen=True)
class DataLine:
    timestamp: datetime
    items: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.items:
            raise ProtocolError("data line must carry at least one item")


def escape_field(text: str) -> str:
    return text.replace("%", "%25").replace("|", "%7C").replace("\n", "%0A")


def unescape_field(text: str) -> str:
    return text.replace("%0A", "\n").replace("%7C", "|").replace("%25", "%")


def format_data_line(line: DataLine) -> bytes:
    parts = [format_timestamp(line.timestamp)]
    for item_id, value in line.items:
        parts.append(escape_field(item_id))
        parts.append(escape_field(value))
    return ("|".join(parts) + "\n").encode("utf-8")


def format_value(value: float | str | None) -> str:
    """Numbers use up to 6 significant digits without trailing zeros;
    strings pass through; a missing value becomes the UNAVAILABLE sentinel."""
    if value is None:
        return UNAVAILABLE
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return f"{value:.6g}"
    return str(value)


def reading_to_data_line(r: Reading) -> DataLine:
    return DataLine(timestamp=r.timestamp, items=((r.artifact_id, format_value(r.value)),))


class AdapterServer:
    """Broadcasts data lines to every connected agent.

    On connect a client first receives a snapshot line per known data item
    (its latest value), then the live stream. Clients that fall more than
    ``backlog_limit`` lines behind are disconnected.
    """

    def __init__(
        self,
        port: int = DEFAULT_PORT,
        host: str = "127.0.0.1",
        heartbeat_ms: int = DEFAULT_HEARTBEAT_MS,
        backlog_limit: int = BACKLOG_LIMIT,
    ):
        self.host = host
        self.port = port
        self.heartbeat_ms = heartbeat_ms
        self.backlog_limit = backlog_limit
        self._lock = threading.Lock()
        self._latest: dict[str, tuple[datetime, str]] = {}
        self._clients: list[Queue] = []
        self._server: socket.socket | None = None
        self._stopped = threading.Event()
        self._threads: list[threading.Thread] = []

    # -- publishing ------------------------------------------------------

    def publish(self, line: DataLine) -> None:
        payload = format_data_line(line)
        with self._lock:
            for item_id, value in line.items:
                self._latest[item_id] = (line.timestamp, value)
            clients = list(self._clients)
        for q in clients:
            try:
                q.put_nowait(payload)
            except Full:
                # slow consumer: detach it; its writer sees the overflow flag
                q.overflowed = True
                with self._lock:
                    if q in self._clients:
                        self._clients.remove(q)

    def publish_reading(self, r: Reading) -> None:
        self.publish(reading_to_data_line(r))

    def snapshot_lines(self) -> list[bytes]:
        with self._lock:
            return [
                format_data_line(DataLine(ts, ((item_id, value),)))
                for item_id, (ts, value) in sorted(self._latest.items())
            ]

    # -- serving ---------------------------------------------------------

    def start(self) -> None:
        self._server = socket.create_server((self.host, self.port))
        if self.port == 0:
            self.port = self._server.getsockname()[1]
        t = threading.Thread(target=self._accept_loop, name="adapter-accept", daemon=True)
        t.start()
        self._threads.append(t)

    def stop(self) -> None:
        self._stopped.set()
        if self._server is not None:
            # shutdown wakes a blocked accept(); close alone may not
            try:
                self._server.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                self._server.close()
            except OSError:
                pass
        with self._lock:
            clients = list(self._clients)
            self._clients.clear()
        for q in clients:
            try:
                q.put_nowait(None)
            except Full:
                pass

    def _accept_loop(self) -> None:
        while not self._stopped.is_set():
            try:
                conn, _addr = self._server.accept()
            except OSError:
                return
            threading.Thread(
                target=self._serve_client, args=(conn,), name="adapter-conn", daemon=True
            ).start()

    def _serve_client(self, conn: socket.socket) -> None:
        queue: Queue = Queue(maxsize=self.backlog_limit)
        queue.overflowed = False
        snapshot = self.snapshot_lines()
        with self._lock:
            self._clients.append(queue)
        try:
            for line in snapshot:
                conn.sendall(line)
            reader = threading.Thread(
                target=self._heartbeat_loop, args=(conn,), daemon=True
            )
            reader.start()
            while not self._stopped.is_set() and not queue.overflowed:
                try:
                    payload = queue.get(timeout=0.25)
                except Empty:
                    continue
                if payload is None:
                    break
                conn.sendall(payload)
        except OSError:
            pass
        finally:
            with self._lock:
                if queue in self._clients:
                    self._clients.remove(queue)
            # shutdown sends FIN even while the heartbeat thread is blocked
            # in recv on this socket; close alone would leave the peer hanging
            try:
                conn.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                conn.close()
            except OSError:
                pass

    def _heartbeat_loop(self, conn: socket.socket) -> None:
        buf = b""
        try:
            while not self._stopped.is_set():
                chunk = conn.recv(1024)
                if not chunk:
                    return
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    if line.strip() == b"* PING":
                        conn.sendall(f"* PONG {self.heartbeat_ms}\n".encode("ascii"))
        except OSError:
            return
