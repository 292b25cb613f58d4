import { ApiClient, ApiError } from "./api.js";
import { TimelineCanvas, type Scene } from "./canvas.js";
import { SidePanel } from "./panels.js";
import {
  applyViewport,
  beginRequest,
  clampZoom,
  endRequest,
  fitViewport,
  initialViewState,
  modeForZoom,
  type ViewState,
} from "./state.js";
import type { EventTypeName, LayoutDoc, SessionDoc } from "./types.js";
import { ExpandBar, LegendPanel, SearchBox } from "./widgets.js";

/** Top-level controller: owns the session id, the fetched documents,
 * and the view state; every mutation round-trips through the service
 * and re-fetches, so the page can be reloaded at any time without
 * losing anything. */
export class App {
  readonly state: ViewState;
  session: SessionDoc | null = null;
  layout: LayoutDoc | null = null;
  sessionId = "";

  readonly canvas: TimelineCanvas;
  readonly searchBox: SearchBox;
  readonly expandBar: ExpandBar;
  readonly sidePanel: SidePanel;
  readonly legend: LegendPanel;
  private relationshipButton: HTMLButtonElement;
  private canvasHost: HTMLElement;
  private skeletons = 0;
  private layoutRefetch: ReturnType<typeof setTimeout> | null = null;

  constructor(
    root: HTMLElement,
    private api: ApiClient,
  ) {
    this.state = initialViewState();
    root.classList.add("gentl-app");

    const header = document.createElement("header");
    root.appendChild(header);
    this.searchBox = new SearchBox(header, {
      onEvents: (topic, context) => void this.runEvents(topic, context),
      onExplain: (topic, context) => void this.runExplain(topic, context),
      onQuestions: (topic, context) => void this.runQuestions(topic, context),
      onAskQuestion: (question) => void this.askQuestion(question),
    });

    this.canvasHost = document.createElement("div");
    this.canvasHost.className = "canvas-host";
    root.appendChild(this.canvasHost);

    this.canvas = new TimelineCanvas(this.canvasHost, {
      onNodeHover: (nodeId, x, y) => this.handleHover(nodeId, x, y),
      onNodeClick: (nodeId, additive) => this.handleNodeClick(nodeId, additive),
      onNodeDoubleClick: (nodeId) => void this.focusEvent(nodeId),
      onNodeMoved: (nodeId, x, y) => void this.moveNode(nodeId, x, y),
      onBackgroundClick: () => this.clearSelection(),
      onViewportChanged: (viewport) => this.setViewport(viewport),
      onBoxSelect: (nodeIds) => this.selectMany(nodeIds),
    });

    this.legend = new LegendPanel(this.canvasHost, (type) => void this.filterType(type));
    this.expandBar = new ExpandBar(this.canvasHost, {
      onEvents: (topic, context, node) => void this.runEvents(topic, context, node),
      onExplain: (topic, context, node) => void this.runExplain(topic, context, node),
      onQuestions: (topic, context) => void this.runQuestions(topic, context),
    });
    this.sidePanel = new SidePanel(root, {
      onFocusRecord: (recordId) => void this.focusRecord(recordId),
      onFocusEvent: (eventId) => void this.focusEvent(eventId),
      onHighlightEvent: (eventId) => this.setHighlight(eventId ? [eventId] : []),
      onAskQuestion: (question) => void this.askQuestion(question),
    });

    this.relationshipButton = document.createElement("button");
    this.relationshipButton.className = "relationship-button hidden";
    this.relationshipButton.textContent = "Generate Relationship";
    this.relationshipButton.addEventListener("click", () => void this.generateRelationship());
    this.canvasHost.appendChild(this.relationshipButton);

    document.addEventListener("keydown", this.handleKey);
  }

  /** Detach document-level listeners (tests and hot reload). */
  destroy(): void {
    document.removeEventListener("keydown", this.handleKey);
  }

  async init(): Promise<void> {
    this.sessionId = await this.api.createSession();
    await this.refresh();
  }

  // --- data flow ----

  async refresh(): Promise<void> {
    this.session = await this.api.getSession(this.sessionId);
    this.layout = await this.api.layout(this.sessionId, this.state.viewport.zoom);
    this.redraw();
  }

  redraw(): void {
    if (!this.session || !this.layout) {
      return;
    }
    const scene: Scene = {
      nodes: this.layout.nodes,
      edges: this.layout.edges,
      ticks: this.layout.ticks,
      events: this.session.events,
      viewport: this.state.viewport,
      selection: this.state.selection,
      highlight: this.state.highlight,
      opacity: this.state.opacity,
      skeletons: this.skeletons,
    };
    this.canvas.render(scene);
    this.sidePanel.update(this.session.records);
    this.searchBox.refreshEnabled(this.state.pending);
    this.positionRelationshipButton();
  }

  // --- generation flows ----

  async runEvents(topic: string, context: string, sourceNode?: string): Promise<void> {
    if (!beginRequest(this.state, "events")) {
      return;
    }
    this.searchBox.showError(null);
    this.skeletons = 6;
    this.redraw();
    try {
      const response = await this.api.generateEvents(this.sessionId, {
        topic,
        context,
        source_node: sourceNode,
      });
      await this.refresh();
      const ids = response.events.map((e) => e.id);
      this.fitToNodes(ids);
      // the relationship paragraph arrives alongside the events
      this.sidePanel.toggle(true);
      this.sidePanel.setTab("relationships");
    } catch (error) {
      this.reportError(error);
    } finally {
      this.skeletons = 0;
      endRequest(this.state, "events");
      this.redraw();
    }
  }

  async runExplain(topic: string, context: string, node?: string): Promise<void> {
    if (!beginRequest(this.state, "explain")) {
      return;
    }
    this.searchBox.showError(null);
    try {
      await this.api.explain(this.sessionId, { topic, context, node });
      await this.refresh();
      this.sidePanel.toggle(true);
      this.sidePanel.setTab("descriptions");
      if (node && this.session) {
        this.expandBar.refreshSummary(this.session.events[node]);
      }
    } catch (error) {
      this.reportError(error);
    } finally {
      endRequest(this.state, "explain");
      this.redraw();
    }
  }

  async runQuestions(topic: string, context: string): Promise<void> {
    if (!beginRequest(this.state, "questions")) {
      return;
    }
    this.searchBox.showError(null);
    try {
      const response = await this.api.questions(this.sessionId, { topic, context });
      this.searchBox.showQuestions(response.questions);
      await this.refresh();
    } catch (error) {
      this.reportError(error);
    } finally {
      endRequest(this.state, "questions");
      this.redraw();
    }
  }

  /** Clicking a question chip answers it as if typed and explained. */
  async askQuestion(question: string): Promise<void> {
    await this.runExplain(question, this.searchBox.context());
  }

  async generateRelationship(): Promise<void> {
    const ids = [...this.state.selection];
    if (ids.length < 2 || !beginRequest(this.state, "relationship")) {
      return;
    }
    try {
      await this.api.relationship(this.sessionId, ids);
      await this.refresh();
      this.sidePanel.toggle(true);
      this.sidePanel.setTab("relationships");
    } catch (error) {
      this.reportError(error);
    } finally {
      endRequest(this.state, "relationship");
      this.redraw();
    }
  }

  // --- navigation ----

  async focusRecord(recordId: string): Promise<void> {
    const response = await this.api.focusRecord(this.sessionId, recordId);
    applyViewport(this.state, response.viewport);
    this.state.opacity = response.opacity ?? {};
    await this.refetchLayoutNow();
  }

  async focusEvent(eventId: string): Promise<void> {
    const response = await this.api.focusEvent(this.sessionId, eventId);
    applyViewport(this.state, response.viewport);
    this.state.highlight = new Set(response.highlight ?? []);
    await this.refetchLayoutNow();
  }

  async filterType(type: EventTypeName): Promise<void> {
    const response = await this.api.filterType(this.sessionId, type);
    this.state.highlight = new Set(response.highlight ?? []);
    applyViewport(this.state, response.viewport);
    await this.refetchLayoutNow();
  }

  // --- canvas interactions ----

  private handleHover(nodeId: string | null, screenX: number, screenY: number): void {
    this.state.hoverNode = nodeId;
    if (!nodeId || !this.session || !this.layout) {
      this.canvas.hideTooltip();
      this.expandBar.scheduleHide();
      return;
    }
    const event = this.session.events[nodeId];
    const node = this.layout.nodes.find((n) => n.event_id === nodeId);
    if (!event || !node) {
      return;
    }
    if (modeForZoom(this.state.viewport.zoom) === "dot") {
      // zoomed out: name, year, and summary (when generated) on hover
      this.canvas.showTooltip(nodeId, screenX, screenY);
    } else {
      this.expandBar.showFor(event, screenX, screenY);
    }
  }

  private handleNodeClick(nodeId: string, additive: boolean): void {
    if (additive) {
      if (this.state.selection.has(nodeId)) {
        this.state.selection.delete(nodeId);
      } else {
        this.state.selection.add(nodeId);
      }
    } else {
      this.state.selection = new Set([nodeId]);
    }
    this.redraw();
  }

  private selectMany(nodeIds: string[]): void {
    this.state.selection = new Set(nodeIds);
    this.redraw();
  }

  private clearSelection(): void {
    if (this.state.selection.size > 0 || this.state.highlight.size > 0) {
      this.state.selection = new Set();
      this.state.highlight = new Set();
      this.state.opacity = {};
      this.redraw();
    }
  }

  async moveNode(nodeId: string, x: number, y: number): Promise<void> {
    try {
      await this.api.moveNode(this.sessionId, nodeId, x, y);
      await this.refresh();
    } catch (error) {
      this.reportError(error);
    }
  }

  async deleteSelected(): Promise<void> {
    const ids = [...this.state.selection];
    this.state.selection = new Set();
    for (const nodeId of ids) {
      try {
        await this.api.deleteNode(this.sessionId, nodeId);
      } catch (error) {
        this.reportError(error);
      }
    }
    if (ids.length > 0) {
      await this.refresh();
    }
  }

  private handleKey = (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    if (event.key === "s") {
      this.sidePanel.toggle();
    } else if (event.key === "Backspace") {
      event.preventDefault();
      void this.deleteSelected();
    }
  };

  setViewport(viewport: { centerX: number; centerY: number; zoom: number }): void {
    const previousMode = modeForZoom(this.state.viewport.zoom);
    this.state.viewport = { ...viewport, zoom: clampZoom(viewport.zoom) };
    this.redraw();
    // node mode comes from the service's layout; refetch when the zoom
    // crosses the collapse threshold (debounced for wheel streams)
    if (modeForZoom(this.state.viewport.zoom) !== previousMode) {
      this.scheduleLayoutRefetch();
    }
  }

  fitToNodes(ids: string[]): void {
    if (!this.session) {
      return;
    }
    const points = ids
      .map((id) => this.session!.placements[id])
      .filter((p) => p !== undefined)
      .map((p) => ({ x: p.x, y: p.y }));
    const fitted = fitViewport(points, this.canvas.size());
    if (fitted) {
      this.state.viewport = fitted;
      this.scheduleLayoutRefetch();
      this.redraw();
    }
  }

  private scheduleLayoutRefetch(): void {
    if (this.layoutRefetch !== null) {
      clearTimeout(this.layoutRefetch);
    }
    this.layoutRefetch = setTimeout(() => {
      void this.refetchLayoutNow();
    }, 150);
  }

  async refetchLayoutNow(): Promise<void> {
    if (this.layoutRefetch !== null) {
      clearTimeout(this.layoutRefetch);
      this.layoutRefetch = null;
    }
    this.layout = await this.api.layout(this.sessionId, this.state.viewport.zoom);
    this.redraw();
  }

  private setHighlight(ids: string[]): void {
    this.state.highlight = new Set(ids);
    this.redraw();
  }

  private positionRelationshipButton(): void {
    const ids = [...this.state.selection];
    if (ids.length < 2 || !this.layout) {
      this.relationshipButton.classList.add("hidden");
      return;
    }
    const nodes = this.layout.nodes.filter((n) => this.state.selection.has(n.event_id));
    if (nodes.length < 2) {
      this.relationshipButton.classList.add("hidden");
      return;
    }
    const size = this.canvas.size();
    const viewport = this.state.viewport;
    const xs = nodes.map(
      (n) => size.width / 2 + (n.x + 80 - viewport.centerX) * viewport.zoom,
    );
    const ys = nodes.map(
      (n) => size.height / 2 + (n.y - viewport.centerY) * viewport.zoom,
    );
    this.relationshipButton.style.left = `${(Math.min(...xs) + Math.max(...xs)) / 2}px`;
    this.relationshipButton.style.top = `${Math.min(...ys) - 36}px`;
    this.relationshipButton.classList.remove("hidden");
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiError) {
      const friendly: Record<number, string> = {
        400: "That request needs a topic (or more selected events).",
        404: "That item no longer exists; the view has been refreshed.",
        422: "The model's answer could not be read; try again.",
        502: "The model service failed; try again shortly.",
        504: "The model service timed out; try again shortly.",
      };
      this.searchBox.showError(friendly[error.status] ?? error.message);
    } else {
      this.searchBox.showError(String(error));
    }
  }
}
