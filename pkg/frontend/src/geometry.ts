/** Coordinate math for the frame canvas.
 *
 * All geometry is stored in corrected-frame pixel coordinates; the canvas may
 * be zoomed, so every conversion divides device coordinates by the zoom factor
 * before rounding. A drag at 2x zoom must therefore store the same rectangle
 * as the identical drag at 1x.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Canvas (device) coordinates -> frame coordinates at the given zoom. */
export function canvasToFrame(p: Point, zoom: number): Point {
  return { x: Math.round(p.x / zoom), y: Math.round(p.y / zoom) };
}

/** Frame coordinates -> canvas coordinates at the given zoom. */
export function frameToCanvas(p: Point, zoom: number): Point {
  return { x: p.x * zoom, y: p.y * zoom };
}

/**
 * Convert a drag gesture (both endpoints in canvas coordinates) into a frame
 * ROI. Returns null for a zero-area drag, which callers surface as a hint
 * rather than storing a degenerate box.
 */
export function dragToRoi(start: Point, end: Point, zoom: number): Box | null {
  const a = canvasToFrame(start, zoom);
  const b = canvasToFrame(end, zoom);
  const x = Math.min(a.x, b.x);
  const y = Math.min(a.y, b.y);
  const w = Math.abs(a.x - b.x);
  const h = Math.abs(a.y - b.y);
  if (w === 0 || h === 0) return null;
  return { x, y, w, h };
}

/** Clamp a box so it lies entirely inside a width x height frame. */
export function clampBox(box: Box, width: number, height: number): Box {
  const x = Math.max(0, Math.min(box.x, width - 1));
  const y = Math.max(0, Math.min(box.y, height - 1));
  const w = Math.max(1, Math.min(box.w, width - x));
  const h = Math.max(1, Math.min(box.h, height - y));
  return { x, y, w, h };
}

/** True when three points sit on one line (within a small tolerance). */
export function collinear(a: Point, b: Point, c: Point, eps = 1e-6): boolean {
  const cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return Math.abs(cross) <= eps;
}

/**
 * A perspective selection is degenerate when any three of its four points are
 * collinear (the homography fit has no unique solution). Used to flag the
 * selection inline and disable save before the server would reject it.
 */
export function degeneratePerspective(points: Point[]): boolean {
  if (points.length !== 4) return true;
  for (let i = 0; i < 4; i++) {
    for (let j = i + 1; j < 4; j++) {
      for (let k = j + 1; k < 4; k++) {
        if (collinear(points[i], points[j], points[k])) return true;
      }
    }
  }
  return false;
}
