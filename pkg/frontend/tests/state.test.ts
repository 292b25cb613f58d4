import { describe, expect, it } from "vitest";

import {
  beginRequest,
  clampZoom,
  endRequest,
  fitViewport,
  initialViewState,
  modeForZoom,
  screenToWorld,
  worldToScreen,
} from "../src/state.js";

describe("zoom", () => {
  it("clamps into the service's range", () => {
    expect(clampZoom(0)).toBe(0.01);
    expect(clampZoom(99)).toBe(10.0);
    expect(clampZoom(1.5)).toBe(1.5);
  });

  it("mirrors the dot-collapse threshold exactly", () => {
    expect(modeForZoom(0.4)).toBe("dot");
    expect(modeForZoom(0.41)).toBe("full");
    expect(modeForZoom(0.3)).toBe("dot");
    expect(modeForZoom(1.0)).toBe("full");
  });
});

describe("request gating", () => {
  it("fires exactly one request per key while in flight", () => {
    const state = initialViewState();
    expect(beginRequest(state, "events")).toBe(true);
    expect(beginRequest(state, "events")).toBe(false);
    expect(beginRequest(state, "explain")).toBe(true);
    endRequest(state, "events");
    expect(beginRequest(state, "events")).toBe(true);
  });
});

describe("coordinate transforms", () => {
  const size = { width: 800, height: 600 };
  const viewport = { centerX: 100, centerY: 50, zoom: 2 };

  it("round-trips world and screen", () => {
    const world = { x: 123.5, y: -77.25 };
    expect(screenToWorld(viewport, size, worldToScreen(viewport, size, world))).toEqual(
      world,
    );
  });

  it("keeps the viewport center at screen center", () => {
    expect(worldToScreen(viewport, size, { x: 100, y: 50 })).toEqual({ x: 400, y: 300 });
  });
});

describe("fitViewport", () => {
  it("matches the service's fit rule on the two-node example", () => {
    const fitted = fitViewport(
      [
        { x: 0, y: 0 },
        { x: 1000, y: 0 },
      ],
      { width: 800, height: 600 },
    );
    expect(fitted).not.toBeNull();
    expect(fitted!.zoom).toBeCloseTo((0.9 * 800) / 1160, 4);
    expect(fitted!.centerX).toBeCloseTo(580);
  });

  it("centers a single node at default zoom", () => {
    expect(fitViewport([{ x: 200, y: 300 }], { width: 800, height: 600 })).toEqual({
      centerX: 200,
      centerY: 300,
      zoom: 1.0,
    });
  });

  it("returns null for no nodes", () => {
    expect(fitViewport([], { width: 800, height: 600 })).toBeNull();
  });
});
