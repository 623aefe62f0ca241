/** Calibration session state.
 *
 * The session holds a working copy of the station config; every edit (ROI
 * drag, perspective pick, parameter change) mutates only the working copy
 * until an explicit save PUTs the whole document. The raw server text is kept
 * as loaded so an untouched session saves back byte-identical content.
 */

import type { ArtifactDoc, StationConfigDoc } from "./api.js";
import type { Box, Point } from "./geometry.js";
import { degeneratePerspective } from "./geometry.js";

export class CalibrationSession {
  private rawText = "";
  private working: StationConfigDoc | null = null;
  private _dirty = false;
  private _selected: string | null = null;
  private _perspectiveTouched = false;

  load(rawText: string): void {
    this.rawText = rawText;
    this.working = JSON.parse(rawText) as StationConfigDoc;
    this._dirty = false;
    this._perspectiveTouched = false;
    if (
      this._selected !== null &&
      !this.working.artifacts.some((a) => a.artifact_id === this._selected)
    ) {
      this._selected = null;
    }
  }

  get loaded(): boolean {
    return this.working !== null;
  }

  get dirty(): boolean {
    return this._dirty;
  }

  /** Changing the perspective invalidates ROIs drawn against the old
   * correction; the UI warns before saving such a session. */
  get perspectiveTouched(): boolean {
    return this._perspectiveTouched;
  }

  get config(): StationConfigDoc {
    if (!this.working) throw new Error("no config loaded");
    return this.working;
  }

  artifactIds(): string[] {
    return this.config.artifacts.map((a) => a.artifact_id);
  }

  select(artifactId: string): void {
    if (!this.config.artifacts.some((a) => a.artifact_id === artifactId)) {
      throw new Error(`unknown artifact: ${artifactId}`);
    }
    this._selected = artifactId;
  }

  get selected(): ArtifactDoc | null {
    if (!this.working || this._selected === null) return null;
    return this.working.artifacts.find((a) => a.artifact_id === this._selected) ?? null;
  }

  setRoi(box: Box): void {
    const artifact = this.selected;
    if (!artifact) throw new Error("no artifact selected");
    artifact.roi = { ...box };
    this._dirty = true;
  }

  /** Returns a warning string for a degenerate selection instead of applying it. */
  setPerspective(src: Point[]): string | null {
    if (degeneratePerspective(src)) {
      return "three of the selected points are collinear; pick again";
    }
    this.config.perspective.src = src.map((p) => ({ x: p.x, y: p.y }));
    this._dirty = true;
    this._perspectiveTouched = true;
    return null;
  }

  setParam(name: string, value: unknown): void {
    const artifact = this.selected;
    if (!artifact) throw new Error("no artifact selected");
    artifact.params = { ...artifact.params, [name]: value };
    this._dirty = true;
  }

  /** The document to PUT: untouched sessions round-trip the server bytes. */
  serialize(): string {
    if (!this._dirty) return this.rawText;
    return JSON.stringify(this.working, null, 2);
  }

  /** Record a successful save so the session is clean against `savedText`. */
  committed(savedText: string): void {
    this.load(savedText);
  }
}
