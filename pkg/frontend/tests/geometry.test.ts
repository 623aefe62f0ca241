import { describe, expect, it } from "vitest";

import { clampBox, collinear, degeneratePerspective, dragToRoi } from "../src/geometry.js";

describe("dragToRoi", () => {
  it("maps a full-frame drag to the full-frame box", () => {
    expect(dragToRoi({ x: 0, y: 0 }, { x: 640, y: 480 }, 1)).toEqual({
      x: 0,
      y: 0,
      w: 640,
      h: 480,
    });
  });

  it("maps (10,10)->(110,60) at 1x to roi (10,10,100,50)", () => {
    expect(dragToRoi({ x: 10, y: 10 }, { x: 110, y: 60 }, 1)).toEqual({
      x: 10,
      y: 10,
      w: 100,
      h: 50,
    });
  });

  it("is zoom-invariant: the same gesture at 2x stores the same roi", () => {
    const at1x = dragToRoi({ x: 10, y: 10 }, { x: 110, y: 60 }, 1);
    const at2x = dragToRoi({ x: 20, y: 20 }, { x: 220, y: 120 }, 2);
    expect(at2x).toEqual(at1x);
  });

  it("normalizes a drag made in any direction", () => {
    expect(dragToRoi({ x: 110, y: 60 }, { x: 10, y: 10 }, 1)).toEqual({
      x: 10,
      y: 10,
      w: 100,
      h: 50,
    });
  });

  it("returns null for a zero-area drag", () => {
    expect(dragToRoi({ x: 10, y: 10 }, { x: 10, y: 60 }, 1)).toBeNull();
    expect(dragToRoi({ x: 10, y: 10 }, { x: 10, y: 10 }, 1)).toBeNull();
  });
});

describe("clampBox", () => {
  it("keeps an in-bounds box unchanged", () => {
    expect(clampBox({ x: 5, y: 5, w: 10, h: 10 }, 100, 100)).toEqual({
      x: 5,
      y: 5,
      w: 10,
      h: 10,
    });
  });

  it("shrinks a box that overflows the frame", () => {
    expect(clampBox({ x: 95, y: 95, w: 20, h: 20 }, 100, 100)).toEqual({
      x: 95,
      y: 95,
      w: 5,
      h: 5,
    });
  });
});

describe("degeneratePerspective", () => {
  it("accepts a proper quadrilateral", () => {
    expect(
      degeneratePerspective([
        { x: 0, y: 0 },
        { x: 100, y: 5 },
        { x: 95, y: 90 },
        { x: 5, y: 100 },
      ]),
    ).toBe(false);
  });

  it("flags three collinear points plus any fourth", () => {
    expect(
      degeneratePerspective([
        { x: 0, y: 0 },
        { x: 50, y: 0 },
        { x: 100, y: 0 },
        { x: 0, y: 100 },
      ]),
    ).toBe(true);
  });

  it("flags the wrong number of points", () => {
    expect(degeneratePerspective([{ x: 0, y: 0 }])).toBe(true);
  });

  it("collinear() detects an exact line", () => {
    expect(collinear({ x: 0, y: 0 }, { x: 1, y: 1 }, { x: 5, y: 5 })).toBe(true);
    expect(collinear({ x: 0, y: 0 }, { x: 1, y: 1 }, { x: 5, y: 6 })).toBe(false);
  });
});
