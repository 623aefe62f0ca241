/** Typed clients for the two backends the UI talks to: the station control
 * API (frames, config, previews, stats) and the agent's observation stream.
 * The UI never recomputes a reading — every displayed value comes verbatim
 * from one of these responses.
 */

import type { Box, Point } from "./geometry.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ReadingDoc {
  station_id: string;
  artifact_id: string;
  kind: string;
  value: number | string | null;
  units: string | null;
  timestamp: string;
  confidence: number;
}

export interface ArtifactDoc {
  artifact_id: string;
  kind: string;
  roi: Box;
  units?: string | null;
  sample_divisor?: number;
  params: Record<string, unknown>;
}

export interface StationConfigDoc {
  schema_version: number;
  station_id: string;
  frame_source: Record<string, unknown>;
  perspective: { src: Point[]; width: number; height: number };
  artifacts: ArtifactDoc[];
}

export interface StatsDoc {
  frames: number;
  drops: number;
  readings: number;
  p50_ms: number | null;
  p95_ms: number | null;
  last_readings: Record<string, ReadingDoc>;
  preview_requests: number;
}

export interface PreviewRequestDoc {
  source?: "latest" | "mock";
  panel?: Record<string, unknown>;
  artifact: ArtifactDoc;
  include_images?: boolean;
}

export interface PreviewResponseDoc {
  reading: ReadingDoc;
  detail?: Record<string, unknown>;
  images?: Record<string, string>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public errors: string[],
  ) {
    super(errors.join("; "));
  }
}

async function errorsOf(resp: Response): Promise<string[]> {
  try {
    const doc = await resp.json();
    if (Array.isArray(doc.errors)) return doc.errors.map(String);
  } catch {
    // non-JSON error body: fall through to the status line
  }
  return [`HTTP ${resp.status}`];
}

export class ControlApi {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  frameUrl(): string {
    // cache-busted so the <img> refresh loop always fetches a new frame
    return `${this.base}/api/frame?t=${Date.now()}`;
  }

  /** The config document as raw text, preserved byte-for-byte for saves. */
  async getConfigText(): Promise<string> {
    const resp = await this.fetchFn(`${this.base}/api/config`);
    if (!resp.ok) throw new ApiError(resp.status, await errorsOf(resp));
    return resp.text();
  }

  /** PUT the document verbatim; the server stores exactly these bytes. */
  async putConfigText(document: string): Promise<void> {
    const resp = await this.fetchFn(`${this.base}/api/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: document,
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorsOf(resp));
  }

  async getStats(): Promise<StatsDoc> {
    const resp = await this.fetchFn(`${this.base}/api/stats`);
    if (!resp.ok) throw new ApiError(resp.status, await errorsOf(resp));
    return resp.json();
  }

  async preview(req: PreviewRequestDoc): Promise<PreviewResponseDoc> {
    const resp = await this.fetchFn(`${this.base}/api/preview`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorsOf(resp));
    return resp.json();
  }
}

// ---------------------------------------------------------------------------
// agent /current parsing

export interface Observation {
  dataItemId: string;
  timestamp: string;
  sequence: number;
  value: string;
  category: "Sample" | "Event";
}

const OBSERVATION_RE =
  /<(Sample|Event)\b([^>]*)>([^<]*)<\/(?:Sample|Event)>/g;
const ATTR_RE = /([\w:-]+)="([^"]*)"/g;

/**
 * Extract observations from an agent /current or /sample document. The agent
 * emits flat machine-generated XML (no nesting inside observation elements,
 * no CDATA), so attribute scanning is sufficient and keeps this module free
 * of DOM dependencies for testing.
 */
export function parseObservations(xml: string): Observation[] {
  const out: Observation[] = [];
  for (const m of xml.matchAll(OBSERVATION_RE)) {
    const attrs: Record<string, string> = {};
    for (const a of m[2].matchAll(ATTR_RE)) attrs[a[1]] = a[2];
    out.push({
      category: m[1] as "Sample" | "Event",
      dataItemId: attrs["dataItemId"] ?? "",
      timestamp: attrs["timestamp"] ?? "",
      sequence: Number(attrs["sequence"] ?? "0"),
      value: m[3],
    });
  }
  return out;
}

export interface AgentHeader {
  instanceId: string;
  firstSequence: number;
  lastSequence: number;
  nextSequence: number;
}

export function parseHeader(xml: string): AgentHeader | null {
  const m = xml.match(/<Header\b([^>]*)\/?>/);
  if (!m) return null;
  const attrs: Record<string, string> = {};
  for (const a of m[1].matchAll(ATTR_RE)) attrs[a[1]] = a[2];
  return {
    instanceId: attrs["instanceId"] ?? "",
    firstSequence: Number(attrs["firstSequence"] ?? "0"),
    lastSequence: Number(attrs["lastSequence"] ?? "0"),
    nextSequence: Number(attrs["nextSequence"] ?? "0"),
  };
}

export class AgentApi {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  async current(): Promise<Observation[]> {
    const resp = await this.fetchFn(`${this.base}/current`);
    if (!resp.ok) throw new ApiError(resp.status, [`HTTP ${resp.status}`]);
    return parseObservations(await resp.text());
  }
}
