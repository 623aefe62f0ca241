/** DOM wiring for the calibration page. All logic with behavior worth testing
 * lives in the sibling modules; this file only connects them to elements.
 */

import { AgentApi, ControlApi, ApiError } from "./api.js";
import type { ArtifactDoc, PreviewResponseDoc } from "./api.js";
import { buildTiles, lampState } from "./dashboard.js";
import type { Point } from "./geometry.js";
import { dragToRoi, frameToCanvas } from "./geometry.js";
import { PreviewLoop } from "./preview-loop.js";
import { CalibrationSession } from "./session.js";
import { validateParams } from "./validate.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

type Mode = "roi" | "perspective";

const api = new ControlApi("");
const session = new CalibrationSession();

let zoom = 1;
let mode: Mode = "roi";
let dragStart: Point | null = null;
let dragEnd: Point | null = null;
let perspectivePicks: Point[] = [];
let frameImage: HTMLImageElement | null = null;

const canvas = $("frame-canvas") as unknown as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

const previewLoop = new PreviewLoop<ArtifactDoc, PreviewResponseDoc>(
  (artifact) => api.preview({ source: "latest", artifact, include_images: true }),
  (res, err) => renderPreview(res, err),
);

// -- frame + overlays --------------------------------------------------------

function redraw(): void {
  if (!frameImage) return;
  canvas.width = frameImage.naturalWidth * zoom;
  canvas.height = frameImage.naturalHeight * zoom;
  ctx.drawImage(frameImage, 0, 0, canvas.width, canvas.height);

  const artifact = session.loaded ? session.selected : null;
  if (artifact) {
    const a = frameToCanvas({ x: artifact.roi.x, y: artifact.roi.y }, zoom);
    ctx.strokeStyle = "#23d160";
    ctx.lineWidth = 2;
    ctx.strokeRect(a.x, a.y, artifact.roi.w * zoom, artifact.roi.h * zoom);
  }
  if (dragStart && dragEnd) {
    ctx.strokeStyle = "#ffdd57";
    ctx.setLineDash([4, 4]);
    ctx.strokeRect(
      Math.min(dragStart.x, dragEnd.x),
      Math.min(dragStart.y, dragEnd.y),
      Math.abs(dragStart.x - dragEnd.x),
      Math.abs(dragStart.y - dragEnd.y),
    );
    ctx.setLineDash([]);
  }
  ctx.fillStyle = "#3273dc";
  for (const p of perspectivePicks) {
    const c = frameToCanvas(p, zoom);
    ctx.beginPath();
    ctx.arc(c.x, c.y, 5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

async function refreshFrame(): Promise<void> {
  const img = new Image();
  img.onload = () => {
    frameImage = img;
    redraw();
  };
  img.src = api.frameUrl();
}

function canvasPoint(ev: MouseEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

canvas.addEventListener("mousedown", (ev) => {
  if (mode !== "roi") return;
  dragStart = canvasPoint(ev);
  dragEnd = dragStart;
});

canvas.addEventListener("mousemove", (ev) => {
  if (mode !== "roi" || !dragStart) return;
  dragEnd = canvasPoint(ev);
  redraw();
});

canvas.addEventListener("mouseup", (ev) => {
  if (mode === "perspective") {
    const p = canvasPoint(ev);
    perspectivePicks.push({ x: Math.round(p.x / zoom), y: Math.round(p.y / zoom) });
    if (perspectivePicks.length === 4) {
      const warning = session.setPerspective(perspectivePicks);
      setHint(warning ?? "perspective updated — existing ROIs may need redrawing");
      if (!warning) perspectivePicks = [];
      else perspectivePicks = [];
      syncControls();
    }
    redraw();
    return;
  }
  if (!dragStart) return;
  const roi = dragToRoi(dragStart, canvasPoint(ev), zoom);
  dragStart = dragEnd = null;
  if (!roi) {
    setHint("drag a rectangle to set the ROI (zero-area drags are ignored)");
  } else if (session.selected) {
    session.setRoi(roi);
    schedulePreview();
    syncControls();
  } else {
    setHint("select an artifact first");
  }
  redraw();
});

// -- session + forms ---------------------------------------------------------

function setHint(text: string): void {
  $("hint").textContent = text;
}

function syncControls(): void {
  const save = $("save") as HTMLButtonElement;
  save.disabled = !session.dirty;
  $("dirty").textContent = session.dirty
    ? session.perspectiveTouched
      ? "unsaved changes (perspective changed: verify ROIs)"
      : "unsaved changes"
    : "saved";
  const artifact = session.selected;
  if (artifact) {
    $("roi-readout").textContent =
      `roi x=${artifact.roi.x} y=${artifact.roi.y} w=${artifact.roi.w} h=${artifact.roi.h}`;
  }
  redraw();
}

function renderArtifactList(): void {
  const list = $("artifacts");
  list.innerHTML = "";
  for (const id of session.artifactIds()) {
    const btn = document.createElement("button");
    btn.textContent = id;
    btn.onclick = () => {
      session.select(id);
      renderParamForm();
      syncControls();
      schedulePreview();
    };
    list.appendChild(btn);
  }
}

function renderParamForm(): void {
  const artifact = session.selected;
  const form = $("params");
  form.innerHTML = "";
  if (!artifact) return;
  for (const [name, value] of Object.entries(artifact.params)) {
    if (typeof value !== "number" && typeof value !== "string" && typeof value !== "boolean") {
      continue; // nested structures (detents, templates) are edited as JSON elsewhere
    }
    const row = document.createElement("label");
    row.textContent = name;
    const input = document.createElement("input");
    input.value = String(value);
    const error = document.createElement("span");
    error.className = "field-error";
    input.onchange = () => {
      const parsed: unknown =
        typeof value === "number" ? Number(input.value)
        : typeof value === "boolean" ? input.value === "true"
        : input.value;
      const fieldErrors = validateParams({ [name]: parsed });
      error.textContent = fieldErrors[name] ?? "";
      if (!fieldErrors[name]) {
        session.setParam(name, parsed);
        syncControls();
        schedulePreview(); // invalid fields never reach the server
      }
    };
    row.appendChild(input);
    row.appendChild(error);
    form.appendChild(row);
  }
}

function schedulePreview(): void {
  const artifact = session.selected;
  if (artifact) previewLoop.schedule(JSON.parse(JSON.stringify(artifact)));
}

function renderPreview(res: PreviewResponseDoc | null, err: unknown): void {
  const out = $("preview-reading");
  if (err) {
    const messages = err instanceof ApiError ? err.errors : [String(err)];
    out.textContent = messages.join("\n");
    out.classList.add("error");
    return;
  }
  if (!res) return;
  out.classList.remove("error");
  out.textContent = JSON.stringify(res.reading, null, 2);
  const imgBox = $("preview-images");
  imgBox.innerHTML = "";
  for (const [label, b64] of Object.entries(res.images ?? {})) {
    const img = document.createElement("img");
    img.title = label;
    img.src = `data:image/png;base64,${b64}`;
    imgBox.appendChild(img);
  }
}

// -- dashboard ---------------------------------------------------------------

function agentApi(): AgentApi {
  const base = ($("agent-url") as HTMLInputElement).value.replace(/\/$/, "");
  return new AgentApi(base);
}

async function pollDashboard(): Promise<void> {
  const banner = $("agent-banner");
  const tilesBox = $("tiles");
  try {
    const [observations, stats] = await Promise.all([
      agentApi().current(),
      api.getStats().catch(() => null),
    ]);
    banner.hidden = true;
    tilesBox.classList.remove("stale-all");
    const unitsById: Record<string, string | null | undefined> = {};
    let lightId = "";
    if (session.loaded) {
      for (const a of session.config.artifacts) {
        unitsById[a.artifact_id] = a.units;
        if (a.kind === "safety_light") lightId = a.artifact_id;
      }
    }
    tilesBox.innerHTML = "";
    for (const tile of buildTiles(observations, unitsById, stats)) {
      const el = document.createElement("div");
      el.className = tile.stale ? "tile stale" : "tile";
      el.innerHTML = `<b>${tile.artifactId}</b><span>${tile.text}</span><small>${tile.timestamp}</small>`;
      tilesBox.appendChild(el);
    }
    $("lamp").dataset.state = lampState(observations, lightId);
    if (stats) {
      $("counters").textContent =
        `frames ${stats.frames} · drops ${stats.drops} · p50 ${stats.p50_ms ?? "-"} ms · p95 ${stats.p95_ms ?? "-"} ms`;
    }
  } catch {
    banner.hidden = false; // keep polling; tiles gray out until it returns
    tilesBox.classList.add("stale-all");
  }
}

// -- bootstrap ----------------------------------------------------------------

async function loadConfig(): Promise<void> {
  session.load(await api.getConfigText());
  renderArtifactList();
  renderParamForm();
  syncControls();
}

function wire(): void {
  $("zoom-in").onclick = () => {
    zoom *= 2;
    redraw();
  };
  $("zoom-out").onclick = () => {
    zoom = Math.max(0.25, zoom / 2);
    redraw();
  };
  $("mode-roi").onclick = () => {
    mode = "roi";
    perspectivePicks = [];
    setHint("drag on the frame to set the selected artifact's ROI");
  };
  $("mode-perspective").onclick = () => {
    mode = "perspective";
    perspectivePicks = [];
    setHint("click the four panel corners (clockwise from top-left)");
  };
  ($("save") as HTMLButtonElement).onclick = async () => {
    const doc = session.serialize();
    try {
      await api.putConfigText(doc);
      session.committed(await api.getConfigText());
      renderArtifactList();
      syncControls();
      setHint("saved");
    } catch (err) {
      const messages = err instanceof ApiError ? err.errors : [String(err)];
      setHint(`save rejected: ${messages.join("; ")}`);
    }
  };
  setInterval(refreshFrame, 1000);
  setInterval(pollDashboard, 1000);
  void refreshFrame();
  void loadConfig();
}

wire();
