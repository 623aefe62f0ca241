"""Command-line entry points.

Exit codes: 0 clean stop, 1 runtime fault, 2 usage/config fault.
"""

from __future__ import annotations

import json
import sys
import threading
from pathlib import Path

import click

from .adapter import DEFAULT_HEARTBEAT_MS, DEFAULT_PORT, AdapterServer
from .agent import (
    DEFAULT_BUFFER_SIZE,
    DEFAULT_HTTP_PORT,
    AdapterClient,
    DeviceModel,
    ObservationBuffer,
    create_agent_app,
)
from .errors import ConfigError, PanelSightError, SpecError
from .imaging import write_png
from .mockpanel import load_panel_spec, render_sequence
from .pipeline import load_station_config, parse_reading_json, run_station

CONFIG_ENVVAR = "PANEL_SIGHT_CONFIG"


def _read_config(path: str):
    p = Path(path)
    if not p.is_file():
        raise click.exceptions.Exit(_fail(2, f"config file not found: {path}"))
    try:
        return load_station_config(p.read_bytes())
    except ConfigError as exc:
        for err in exc.errors:
            click.echo(f"error: {err}", err=True)
        raise click.exceptions.Exit(2)


def _fail(code: int, message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return code


@click.group()
def main():
    """Camera-based digitization of legacy machine panels."""


@main.command()
@click.argument("config", envvar=CONFIG_ENVVAR)
def validate(config):
    """Validate a station config; print every problem found."""
    cfg = _read_config(config)
    click.echo(f"OK: 1 station, {len(cfg.artifacts)} artifacts")


@main.command()
@click.argument("config", envvar=CONFIG_ENVVAR)
@click.option("--adapter-port", default=DEFAULT_PORT, show_default=True)
@click.option("--no-adapter", is_flag=True, help="print readings to stdout instead")
@click.option("--offline", is_flag=True, help="process every frame without pacing")
def run(config, adapter_port, no_adapter, offline):
    """Run a station: pipeline composed with the adapter in-process."""
    cfg = _read_config(config)
    adapter = None
    if not no_adapter:
        adapter = AdapterServer(port=adapter_port)
        try:
            adapter.start()
        except OSError as exc:
            raise click.exceptions.Exit(_fail(1, f"cannot bind adapter port: {exc}"))

    from .pipeline import reading_to_json

    def sink(r):
        if adapter is not None:
            adapter.publish_reading(r)
        else:
            click.echo(reading_to_json(r).decode("utf-8"))

    try:
        stats = run_station(cfg, sink, realtime=not offline)
    except PanelSightError as exc:
        raise click.exceptions.Exit(_fail(1, str(exc)))
    finally:
        if adapter is not None:
            adapter.stop()
    click.echo(json.dumps(stats.summary()), err=True)


@main.command("render-mock")
@click.argument("spec")
@click.option("--out", required=True, type=click.Path(), help="output directory")
@click.option("--fps", default=30, show_default=True)
@click.option("--count", default=1, show_default=True, help="frames for a single-panel spec")
def render_mock(spec, out, fps, count):
    """Render a mock panel document to PNG frames plus truth.json."""
    path = Path(spec)
    if not path.is_file():
        raise click.exceptions.Exit(_fail(2, f"panel spec not found: {spec}"))
    try:
        doc = json.loads(path.read_text())
        if isinstance(doc, dict) and "base" in doc:
            from .mockpanel import PanelSpec, sequence_specs

            base = PanelSpec.model_validate(doc["base"])
            specs = sequence_specs(base, doc.get("frames", []))
        else:
            specs = [load_panel_spec(path)] * count
        frames = render_sequence(specs, fps)
    except (SpecError, ValueError) as exc:
        raise click.exceptions.Exit(_fail(2, str(exc)))

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = []
    for i, (frame, gt, ts) in enumerate(frames):
        write_png(frame, out_dir / f"frame_{i:05d}.png")
        record = gt.to_json_dict()
        record["frame"] = f"frame_{i:05d}.png"
        record["timestamp"] = ts.isoformat().replace("+00:00", "Z")
        truth.append(record)
    (out_dir / "truth.json").write_text(json.dumps(truth, indent=2))
    click.echo(f"wrote {len(frames)} frames to {out_dir}")


@main.command()
@click.option("--port", default=DEFAULT_PORT, show_default=True)
@click.option("--heartbeat-ms", default=DEFAULT_HEARTBEAT_MS, show_default=True)
def adapter(port, heartbeat_ms):
    """Serve an adapter fed by newline-delimited reading JSON on stdin."""
    srv = AdapterServer(port=port, heartbeat_ms=heartbeat_ms)
    try:
        srv.start()
    except OSError as exc:
        raise click.exceptions.Exit(_fail(1, f"cannot bind port {port}: {exc}"))
    try:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                srv.publish_reading(parse_reading_json(line))
            except (ValueError, KeyError) as exc:
                click.echo(f"skipped malformed reading: {exc}", err=True)
    except KeyboardInterrupt:
        pass
    finally:
        srv.stop()


@main.command()
@click.option("--config", envvar=CONFIG_ENVVAR, required=True, help="station config (device model)")
@click.option("--adapter-host", default="127.0.0.1", show_default=True)
@click.option("--adapter-port", default=DEFAULT_PORT, show_default=True)
@click.option("--http-port", default=DEFAULT_HTTP_PORT, show_default=True)
@click.option("--buffer-size", default=DEFAULT_BUFFER_SIZE, show_default=True)
def agent(config, adapter_host, adapter_port, http_port, buffer_size):
    """Serve buffered observations over HTTP (probe/current/sample)."""
    import uvicorn

    cfg = _read_config(config)
    model = DeviceModel.from_station_config(cfg)
    buf = ObservationBuffer(model, capacity=buffer_size)
    client = AdapterClient(buf, host=adapter_host, port=adapter_port)
    client.start()
    app = create_agent_app(buf)
    try:
        uvicorn.run(app, host="127.0.0.1", port=http_port, log_level="warning")
    finally:
        client.stop()


@main.command()
@click.option("--config", envvar=CONFIG_ENVVAR, required=True)
@click.option("--http-port", default=8080, show_default=True)
@click.option("--adapter-port", default=DEFAULT_PORT, show_default=True)
@click.option("--no-adapter", is_flag=True)
@click.option("--ui-dir", default=None, help="static UI assets (defaults to bundled build)")
def calibrate(config, http_port, adapter_port, no_adapter, ui_dir):
    """Start the control API (and UI, if built) on a running station."""
    import uvicorn

    from .control import StationRuntime, create_control_app

    _read_config(config)  # fail fast with exit code 2 on a bad document
    adapter_srv = None
    if not no_adapter:
        adapter_srv = AdapterServer(port=adapter_port)
        try:
            adapter_srv.start()
        except OSError as exc:
            raise click.exceptions.Exit(_fail(1, f"cannot bind adapter port: {exc}"))
    runtime = StationRuntime(config, adapter=adapter_srv)
    runtime.start()
    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = bundled if bundled.is_dir() else None
    app = create_control_app(runtime, static_dir=ui_dir)
    try:
        uvicorn.run(app, host="127.0.0.1", port=http_port, log_level="warning")
    finally:
        runtime.stop()
        if adapter_srv is not None:
            adapter_srv.stop()


if __name__ == "__main__":
    main()
