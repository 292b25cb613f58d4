import type { ViewportDoc } from "./types.js";

/** Client-side view state. Domain truth stays on the service: reloading
 * the page and re-fetching session + layout must reproduce the scene. */

export const ZOOM_MIN = 0.01;
export const ZOOM_MAX = 10.0;
export const DOT_ZOOM_THRESHOLD = 0.4;

export type SideTab = "descriptions" | "relationships";

export interface Viewport {
  centerX: number;
  centerY: number;
  zoom: number;
}

export interface ViewState {
  viewport: Viewport;
  activeTab: SideTab;
  sidePanelOpen: boolean;
  hoverNode: string | null;
  pending: Set<string>;
  selection: Set<string>;
  highlight: Set<string>;
  opacity: Record<string, number>;
}

export function initialViewState(): ViewState {
  return {
    viewport: { centerX: 640, centerY: -100, zoom: 1.0 },
    activeTab: "descriptions",
    sidePanelOpen: false,
    hoverNode: null,
    pending: new Set(),
    selection: new Set(),
    highlight: new Set(),
    opacity: {},
  };
}

export function clampZoom(zoom: number): number {
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, zoom));
}

/** Mirror of the service's semantic-zoom rule so wheel zooming can
 * switch modes instantly between layout refetches. */
export function modeForZoom(zoom: number): "full" | "dot" {
  return zoom <= DOT_ZOOM_THRESHOLD ? "dot" : "full";
}

/** Begin a gated request; returns false (and does nothing) while the
 * same key is in flight, so rapid clicks fire exactly one request. */
export function beginRequest(state: ViewState, key: string): boolean {
  if (state.pending.has(key)) {
    return false;
  }
  state.pending.add(key);
  return true;
}

export function endRequest(state: ViewState, key: string): void {
  state.pending.delete(key);
}

export function applyViewport(state: ViewState, doc: ViewportDoc | null): void {
  if (!doc) {
    return;
  }
  state.viewport = {
    centerX: doc.center_x,
    centerY: doc.center_y,
    zoom: clampZoom(doc.zoom),
  };
}

export function worldToScreen(
  viewport: Viewport,
  size: { width: number; height: number },
  point: { x: number; y: number },
): { x: number; y: number } {
  return {
    x: size.width / 2 + (point.x - viewport.centerX) * viewport.zoom,
    y: size.height / 2 + (point.y - viewport.centerY) * viewport.zoom,
  };
}

export function screenToWorld(
  viewport: Viewport,
  size: { width: number; height: number },
  point: { x: number; y: number },
): { x: number; y: number } {
  return {
    x: viewport.centerX + (point.x - size.width / 2) / viewport.zoom,
    y: viewport.centerY + (point.y - size.height / 2) / viewport.zoom,
  };
}

export const NODE_W = 160;
export const NODE_H = 50;
const FIT_SLACK = 0.9;

/** Client-side fit over node placements; same slack rule the service
 * uses, for the "pan to the freshly generated events" transition. */
export function fitViewport(
  points: { x: number; y: number }[],
  size: { width: number; height: number },
): Viewport | null {
  if (points.length === 0) {
    return null;
  }
  if (points.length === 1) {
    return { centerX: points[0].x, centerY: points[0].y, zoom: 1.0 };
  }
  const minX = Math.min(...points.map((p) => p.x));
  const maxX = Math.max(...points.map((p) => p.x + NODE_W));
  const minY = Math.min(...points.map((p) => p.y));
  const maxY = Math.max(...points.map((p) => p.y + NODE_H));
  const zoom = clampZoom(
    Math.min(
      1.0,
      FIT_SLACK * Math.min(size.width / (maxX - minX), size.height / (maxY - minY)),
    ),
  );
  return { centerX: (minX + maxX) / 2, centerY: (minY + maxY) / 2, zoom };
}

export function toggleSelection(state: ViewState, nodeId: string): void {
  if (state.selection.has(nodeId)) {
    state.selection.delete(nodeId);
  } else {
    state.selection.add(nodeId);
  }
}
