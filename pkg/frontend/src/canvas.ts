import { colorFor } from "./palette.js";
import {
  NODE_H,
  NODE_W,
  type Viewport,
  worldToScreen,
} from "./state.js";
import type { EdgeDoc, EventDoc, LayoutNodeDoc, TickDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const DOT_RADIUS = 8;
const AXIS_HEIGHT = 28;

export interface Scene {
  nodes: LayoutNodeDoc[];
  edges: EdgeDoc[];
  ticks: TickDoc[];
  events: Record<string, EventDoc>;
  viewport: Viewport;
  selection: Set<string>;
  highlight: Set<string>;
  /** per-node opacity override (dim mask from a focused record) */
  opacity: Record<string, number>;
  skeletons: number;
}

export interface CanvasCallbacks {
  onNodeHover(nodeId: string | null, screenX: number, screenY: number): void;
  onNodeClick(nodeId: string, additive: boolean): void;
  onNodeDoubleClick(nodeId: string): void;
  onNodeMoved(nodeId: string, worldX: number, worldY: number): void;
  onBackgroundClick(): void;
  onViewportChanged(viewport: Viewport): void;
  onBoxSelect(nodeIds: string[]): void;
}

interface DragState {
  kind: "node" | "pan" | "box";
  nodeId?: string;
  startScreenX: number;
  startScreenY: number;
  startWorld?: { x: number; y: number };
  startViewport?: Viewport;
  moved: boolean;
}

/** SVG scene renderer for the timeline view.
 *
 * Everything drawn comes from the latest layout + session fetch; the
 * canvas holds no domain state of its own. Node geometry matches the
 * service: a placement is the top-left corner of a 160x50 box, and dots
 * sit at the box center.
 */
export class TimelineCanvas {
  readonly root: HTMLElement;
  private svg: SVGSVGElement;
  private edgeLayer: SVGGElement;
  private nodeLayer: SVGGElement;
  private axisLayer: SVGGElement;
  private tooltip: HTMLDivElement;
  private drag: DragState | null = null;
  private scene: Scene | null = null;
  private boxRect: SVGRectElement | null = null;

  constructor(
    root: HTMLElement,
    private callbacks: CanvasCallbacks,
  ) {
    this.root = root;
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.classList.add("timeline-canvas");
    this.svg.setAttribute("width", "100%");
    this.svg.setAttribute("height", "100%");

    const defs = document.createElementNS(SVG_NS, "defs");
    const marker = document.createElementNS(SVG_NS, "marker");
    marker.setAttribute("id", "arrow-head");
    marker.setAttribute("viewBox", "0 0 10 10");
    marker.setAttribute("refX", "9");
    marker.setAttribute("refY", "5");
    marker.setAttribute("markerWidth", "7");
    marker.setAttribute("markerHeight", "7");
    marker.setAttribute("orient", "auto-start-reverse");
    const head = document.createElementNS(SVG_NS, "path");
    head.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
    head.setAttribute("fill", "#666");
    marker.appendChild(head);
    defs.appendChild(marker);
    this.svg.appendChild(defs);

    this.edgeLayer = document.createElementNS(SVG_NS, "g");
    this.edgeLayer.classList.add("edges");
    this.nodeLayer = document.createElementNS(SVG_NS, "g");
    this.nodeLayer.classList.add("nodes");
    this.axisLayer = document.createElementNS(SVG_NS, "g");
    this.axisLayer.classList.add("axis");
    this.svg.append(this.edgeLayer, this.nodeLayer, this.axisLayer);
    root.appendChild(this.svg);

    this.tooltip = document.createElement("div");
    this.tooltip.className = "node-tooltip hidden";
    root.appendChild(this.tooltip);

    this.bindPointerHandlers();
  }

  size(): { width: number; height: number } {
    const rect = this.root.getBoundingClientRect();
    return { width: rect.width || 1280, height: rect.height || 720 };
  }

  render(scene: Scene): void {
    this.scene = scene;
    const size = this.size();
    this.renderEdges(scene, size);
    this.renderNodes(scene, size);
    this.renderAxis(scene, size);
  }

  private nodeCenter(node: LayoutNodeDoc): { x: number; y: number } {
    return { x: node.x + NODE_W / 2, y: node.y + NODE_H / 2 };
  }

  private renderEdges(scene: Scene, size: { width: number; height: number }): void {
    this.edgeLayer.replaceChildren();
    const byId = new Map(scene.nodes.map((n) => [n.event_id, n]));
    for (const edge of scene.edges) {
      const from = byId.get(edge.from_node);
      const to = byId.get(edge.to_node);
      if (!from || !to) {
        continue;
      }
      const a = worldToScreen(scene.viewport, size, this.nodeCenter(from));
      const b = worldToScreen(scene.viewport, size, this.nodeCenter(to));
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.dataset.edgeId = edge.id;
      line.dataset.kind = edge.kind;
      if (edge.kind === "Provenance") {
        line.classList.add("edge-provenance");
        line.setAttribute("marker-end", "url(#arrow-head)");
      } else {
        line.classList.add("edge-relationship");
      }
      this.edgeLayer.appendChild(line);
    }
  }

  private renderNodes(scene: Scene, size: { width: number; height: number }): void {
    this.nodeLayer.replaceChildren();
    for (const node of scene.nodes) {
      const event = scene.events[node.event_id];
      const group = document.createElementNS(SVG_NS, "g");
      group.classList.add("node");
      group.dataset.nodeId = node.event_id;
      group.dataset.mode = node.mode;
      const opacity = scene.opacity[node.event_id] ?? node.opacity;
      group.setAttribute("opacity", String(opacity));
      if (scene.selection.has(node.event_id)) {
        group.classList.add("selected");
      }
      if (scene.highlight.has(node.event_id)) {
        group.classList.add("highlighted");
      }
      const fill = event ? colorFor(event.event_type) : colorFor("Other");
      const screen = worldToScreen(scene.viewport, size, { x: node.x, y: node.y });
      const center = worldToScreen(scene.viewport, size, this.nodeCenter(node));

      if (node.mode === "dot") {
        const dot = document.createElementNS(SVG_NS, "circle");
        dot.setAttribute("cx", String(center.x));
        dot.setAttribute("cy", String(center.y));
        dot.setAttribute("r", String(DOT_RADIUS));
        dot.setAttribute("fill", fill);
        dot.classList.add("node-dot");
        group.appendChild(dot);
      } else {
        const zoom = scene.viewport.zoom;
        const rect = document.createElementNS(SVG_NS, "rect");
        rect.setAttribute("x", String(screen.x));
        rect.setAttribute("y", String(screen.y));
        rect.setAttribute("width", String(NODE_W * zoom));
        rect.setAttribute("height", String(NODE_H * zoom));
        rect.setAttribute("rx", String(6 * zoom));
        rect.setAttribute("fill", fill);
        rect.classList.add("node-box");
        group.appendChild(rect);

        const label = document.createElementNS(SVG_NS, "text");
        label.setAttribute("x", String(screen.x + 8 * zoom));
        label.setAttribute("y", String(screen.y + 20 * zoom));
        label.setAttribute("font-size", String(12 * zoom));
        label.classList.add("node-label");
        label.textContent = this.ellipsize(event ? event.name : node.label, 24);
        group.appendChild(label);

        const year = document.createElementNS(SVG_NS, "text");
        year.setAttribute("x", String(screen.x + 8 * zoom));
        year.setAttribute("y", String(screen.y + 38 * zoom));
        year.setAttribute("font-size", String(11 * zoom));
        year.classList.add("node-year");
        year.textContent = this.yearOf(node.label);
        group.appendChild(year);
      }
      this.nodeLayer.appendChild(group);
    }

    for (let i = 0; i < scene.skeletons; i += 1) {
      const skeleton = document.createElementNS(SVG_NS, "rect");
      skeleton.classList.add("node-skeleton");
      skeleton.setAttribute("x", String(40 + i * 60));
      skeleton.setAttribute("y", String(size.height / 2));
      skeleton.setAttribute("width", String(NODE_W * 0.6));
      skeleton.setAttribute("height", String(NODE_H * 0.6));
      skeleton.setAttribute("rx", "6");
      this.nodeLayer.appendChild(skeleton);
    }
  }

  private renderAxis(scene: Scene, size: { width: number; height: number }): void {
    this.axisLayer.replaceChildren();
    const y = size.height - AXIS_HEIGHT;
    const baseline = document.createElementNS(SVG_NS, "line");
    baseline.classList.add("axis-line");
    baseline.setAttribute("x1", "0");
    baseline.setAttribute("y1", String(y));
    baseline.setAttribute("x2", String(size.width));
    baseline.setAttribute("y2", String(y));
    this.axisLayer.appendChild(baseline);
    for (const tick of scene.ticks) {
      const screenX =
        size.width / 2 + (tick.x - scene.viewport.centerX) * scene.viewport.zoom;
      if (screenX < -40 || screenX > size.width + 40) {
        continue;
      }
      const mark = document.createElementNS(SVG_NS, "line");
      mark.classList.add("axis-tick");
      mark.setAttribute("x1", String(screenX));
      mark.setAttribute("y1", String(y));
      mark.setAttribute("x2", String(screenX));
      mark.setAttribute("y2", String(y + 6));
      this.axisLayer.appendChild(mark);
      const label = document.createElementNS(SVG_NS, "text");
      label.classList.add("axis-label");
      label.setAttribute("x", String(screenX));
      label.setAttribute("y", String(y + 20));
      label.setAttribute("text-anchor", "middle");
      label.textContent = tick.label;
      this.axisLayer.appendChild(label);
    }
  }

  showTooltip(nodeId: string, screenX: number, screenY: number): void {
    const scene = this.scene;
    if (!scene) {
      return;
    }
    const node = scene.nodes.find((n) => n.event_id === nodeId);
    const event = scene.events[nodeId];
    if (!node || !event) {
      return;
    }
    const summary = event.short_summary ? `<div class="tip-summary">${escapeHtml(event.short_summary)}</div>` : "";
    this.tooltip.innerHTML = `<div class="tip-title">${escapeHtml(node.label)}</div>${summary}`;
    this.tooltip.style.left = `${screenX + 12}px`;
    this.tooltip.style.top = `${screenY + 12}px`;
    this.tooltip.classList.remove("hidden");
  }

  hideTooltip(): void {
    this.tooltip.classList.add("hidden");
  }

  private ellipsize(text: string, max: number): string {
    return text.length > max ? `${text.slice(0, max - 1)}…` : text;
  }

  private yearOf(label: string): string {
    const match = /\(([^)]*)\)$/.exec(label);
    return match ? match[1] : "";
  }

  private nodeIdAt(target: EventTarget | null): string | null {
    let element = target as Element | null;
    while (element && element !== (this.svg as unknown as Element)) {
      const nodeId = (element as SVGElement).dataset?.nodeId;
      if (nodeId) {
        return nodeId;
      }
      element = element.parentElement;
    }
    return null;
  }

  private bindPointerHandlers(): void {
    this.svg.addEventListener("pointerdown", (event) => {
      const nodeId = this.nodeIdAt(event.target);
      if (nodeId && this.scene) {
        const node = this.scene.nodes.find((n) => n.event_id === nodeId);
        this.drag = {
          kind: "node",
          nodeId,
          startScreenX: event.clientX,
          startScreenY: event.clientY,
          startWorld: node ? { x: node.x, y: node.y } : undefined,
          moved: false,
        };
      } else if (event.shiftKey) {
        this.drag = {
          kind: "box",
          startScreenX: event.clientX,
          startScreenY: event.clientY,
          moved: false,
        };
        this.beginBox(event.clientX, event.clientY);
      } else if (this.scene) {
        this.drag = {
          kind: "pan",
          startScreenX: event.clientX,
          startScreenY: event.clientY,
          startViewport: { ...this.scene.viewport },
          moved: false,
        };
      }
    });

    this.svg.addEventListener("pointermove", (event) => {
      if (!this.drag || !this.scene) {
        const nodeId = this.nodeIdAt(event.target);
        this.callbacks.onNodeHover(nodeId, event.clientX, event.clientY);
        return;
      }
      const dx = event.clientX - this.drag.startScreenX;
      const dy = event.clientY - this.drag.startScreenY;
      if (Math.abs(dx) + Math.abs(dy) > 3) {
        this.drag.moved = true;
      }
      if (this.drag.kind === "pan" && this.drag.startViewport) {
        const zoom = this.drag.startViewport.zoom;
        this.callbacks.onViewportChanged({
          centerX: this.drag.startViewport.centerX - dx / zoom,
          centerY: this.drag.startViewport.centerY - dy / zoom,
          zoom,
        });
      } else if (this.drag.kind === "box") {
        this.updateBox(event.clientX, event.clientY);
      }
    });

    this.svg.addEventListener("pointerup", (event) => {
      const drag = this.drag;
      this.drag = null;
      if (!drag || !this.scene) {
        return;
      }
      if (drag.kind === "node" && drag.nodeId) {
        if (drag.moved && drag.startWorld) {
          const dx = (event.clientX - drag.startScreenX) / this.scene.viewport.zoom;
          const dy = (event.clientY - drag.startScreenY) / this.scene.viewport.zoom;
          this.callbacks.onNodeMoved(
            drag.nodeId,
            drag.startWorld.x + dx,
            drag.startWorld.y + dy,
          );
        } else {
          this.callbacks.onNodeClick(drag.nodeId, event.shiftKey);
        }
      } else if (drag.kind === "box") {
        this.finishBox(drag, event.clientX, event.clientY);
      } else if (drag.kind === "pan" && !drag.moved) {
        this.callbacks.onBackgroundClick();
      }
    });

    this.svg.addEventListener("dblclick", (event) => {
      const nodeId = this.nodeIdAt(event.target);
      if (nodeId) {
        this.callbacks.onNodeDoubleClick(nodeId);
      }
    });

    this.svg.addEventListener("wheel", (event) => {
      if (!this.scene) {
        return;
      }
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
      const viewport = this.scene.viewport;
      this.callbacks.onViewportChanged({
        centerX: viewport.centerX,
        centerY: viewport.centerY,
        zoom: viewport.zoom * factor,
      });
    });
  }

  private svgPoint(clientX: number, clientY: number): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    return { x: clientX - rect.left, y: clientY - rect.top };
  }

  private beginBox(clientX: number, clientY: number): void {
    this.boxRect = document.createElementNS(SVG_NS, "rect");
    this.boxRect.classList.add("select-box");
    this.svg.appendChild(this.boxRect);
    this.updateBox(clientX, clientY);
  }

  private updateBox(clientX: number, clientY: number): void {
    if (!this.boxRect || !this.drag) {
      return;
    }
    const start = this.svgPoint(this.drag.startScreenX, this.drag.startScreenY);
    const now = this.svgPoint(clientX, clientY);
    const x = Math.min(start.x, now.x);
    const y = Math.min(start.y, now.y);
    this.boxRect.setAttribute("x", String(x));
    this.boxRect.setAttribute("y", String(y));
    this.boxRect.setAttribute("width", String(Math.abs(now.x - start.x)));
    this.boxRect.setAttribute("height", String(Math.abs(now.y - start.y)));
  }

  private finishBox(drag: DragState, clientX: number, clientY: number): void {
    if (this.boxRect) {
      this.boxRect.remove();
      this.boxRect = null;
    }
    const scene = this.scene;
    if (!scene) {
      return;
    }
    const size = this.size();
    const start = this.svgPoint(drag.startScreenX, drag.startScreenY);
    const end = this.svgPoint(clientX, clientY);
    const minX = Math.min(start.x, end.x);
    const maxX = Math.max(start.x, end.x);
    const minY = Math.min(start.y, end.y);
    const maxY = Math.max(start.y, end.y);
    const picked: string[] = [];
    for (const node of scene.nodes) {
      const center = worldToScreen(scene.viewport, size, this.nodeCenter(node));
      if (center.x >= minX && center.x <= maxX && center.y >= minY && center.y <= maxY) {
        picked.push(node.event_id);
      }
    }
    this.callbacks.onBoxSelect(picked);
  }
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
