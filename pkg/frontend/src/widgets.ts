import { colorFor, TYPE_ORDER } from "./palette.js";
import type { EventDoc, EventTypeName } from "./types.js";

export interface GenerateCallbacks {
  onEvents(topic: string, context: string, sourceNode?: string): void;
  onExplain(topic: string, context: string, node?: string): void;
  onQuestions(topic: string, context: string): void;
}

/** Top search box: topic + steering-context fields, the three generate
 * buttons, and a chips row for generated questions. */
export class SearchBox {
  readonly root: HTMLDivElement;
  private topicInput: HTMLInputElement;
  private contextInput: HTMLInputElement;
  private buttons: Record<string, HTMLButtonElement> = {};
  private chipsRow: HTMLDivElement;
  private errorBanner: HTMLDivElement;

  constructor(
    parent: HTMLElement,
    private callbacks: GenerateCallbacks & { onAskQuestion(question: string): void },
  ) {
    this.root = document.createElement("div");
    this.root.className = "search-box";

    this.topicInput = document.createElement("input");
    this.topicInput.placeholder = "Topic (e.g. Age of Discovery)";
    this.topicInput.className = "topic-input";
    this.contextInput = document.createElement("input");
    this.contextInput.placeholder = "Context (e.g. North America)";
    this.contextInput.className = "context-input";

    const buttonRow = document.createElement("div");
    buttonRow.className = "button-row";
    for (const name of ["Events", "Explain", "Questions"] as const) {
      const button = document.createElement("button");
      button.textContent = name;
      button.dataset.action = name.toLowerCase();
      button.addEventListener("click", () => this.trigger(name));
      this.buttons[name] = button;
      buttonRow.appendChild(button);
    }
    this.topicInput.addEventListener("input", () => this.refreshEnabled());

    this.chipsRow = document.createElement("div");
    this.chipsRow.className = "question-chips search-chips";
    this.errorBanner = document.createElement("div");
    this.errorBanner.className = "error-banner hidden";

    this.root.append(this.topicInput, this.contextInput, buttonRow, this.chipsRow, this.errorBanner);
    parent.appendChild(this.root);
    this.refreshEnabled();
  }

  private trigger(name: "Events" | "Explain" | "Questions"): void {
    const topic = this.topicInput.value.trim();
    const context = this.contextInput.value.trim();
    if (name === "Events") {
      this.callbacks.onEvents(topic, context);
    } else if (name === "Explain") {
      this.callbacks.onExplain(topic, context);
    } else {
      this.callbacks.onQuestions(topic, context);
    }
  }

  refreshEnabled(pendingActions: Set<string> = new Set()): void {
    const hasTopic = this.topicInput.value.trim().length > 0;
    this.buttons.Events.disabled = !hasTopic || pendingActions.has("events");
    this.buttons.Explain.disabled = !hasTopic || pendingActions.has("explain");
    this.buttons.Questions.disabled = !hasTopic || pendingActions.has("questions");
  }

  showQuestions(questions: string[]): void {
    this.chipsRow.replaceChildren();
    for (const question of questions) {
      const chip = document.createElement("button");
      chip.className = "question-chip";
      chip.textContent = question;
      chip.addEventListener("click", () => this.callbacks.onAskQuestion(question));
      this.chipsRow.appendChild(chip);
    }
  }

  showError(message: string | null): void {
    this.errorBanner.classList.toggle("hidden", message === null);
    this.errorBanner.textContent = message ?? "";
  }

  topic(): string {
    return this.topicInput.value.trim();
  }

  context(): string {
    return this.contextInput.value.trim();
  }
}

const HIDE_DELAY_MS = 300;

/** Hover toolbar over a node: mirrors the search box with the node's
 * name pre-filled; shows the node's short summary once generated. */
export class ExpandBar {
  readonly root: HTMLDivElement;
  private nameField: HTMLDivElement;
  private summaryField: HTMLDivElement;
  private contextInput: HTMLInputElement;
  private nodeId: string | null = null;
  private hideTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    parent: HTMLElement,
    private callbacks: GenerateCallbacks,
  ) {
    this.root = document.createElement("div");
    this.root.className = "expand-bar hidden";
    this.nameField = document.createElement("div");
    this.nameField.className = "expand-name";
    this.summaryField = document.createElement("div");
    this.summaryField.className = "expand-summary";
    this.contextInput = document.createElement("input");
    this.contextInput.placeholder = "Context";
    this.contextInput.className = "context-input";
    const buttonRow = document.createElement("div");
    buttonRow.className = "button-row";
    for (const name of ["Events", "Explain", "Questions"] as const) {
      const button = document.createElement("button");
      button.textContent = name;
      button.dataset.action = `expand-${name.toLowerCase()}`;
      button.addEventListener("click", () => this.trigger(name));
      buttonRow.appendChild(button);
    }
    this.root.append(this.nameField, this.summaryField, this.contextInput, buttonRow);
    this.root.addEventListener("mouseenter", () => this.cancelHide());
    this.root.addEventListener("mouseleave", () => this.scheduleHide());
    parent.appendChild(this.root);
  }

  private trigger(name: "Events" | "Explain" | "Questions"): void {
    if (!this.nodeId) {
      return;
    }
    const topic = this.nameField.textContent ?? "";
    const context = this.contextInput.value.trim();
    if (name === "Events") {
      this.callbacks.onEvents(topic, context, this.nodeId);
    } else if (name === "Explain") {
      this.callbacks.onExplain(topic, context, this.nodeId);
    } else {
      this.callbacks.onQuestions(topic, context);
    }
  }

  showFor(event: EventDoc, screenX: number, screenY: number): void {
    this.cancelHide();
    this.nodeId = event.id;
    this.nameField.textContent = event.name;
    this.summaryField.textContent = event.short_summary ?? "";
    this.summaryField.classList.toggle("hidden", !event.short_summary);
    this.root.style.left = `${screenX}px`;
    this.root.style.top = `${screenY - 8}px`;
    this.root.classList.remove("hidden");
  }

  refreshSummary(event: EventDoc): void {
    if (this.nodeId === event.id) {
      this.summaryField.textContent = event.short_summary ?? "";
      this.summaryField.classList.toggle("hidden", !event.short_summary);
    }
  }

  scheduleHide(): void {
    this.cancelHide();
    this.hideTimer = setTimeout(() => this.hide(), HIDE_DELAY_MS);
  }

  cancelHide(): void {
    if (this.hideTimer !== null) {
      clearTimeout(this.hideTimer);
      this.hideTimer = null;
    }
  }

  hide(): void {
    this.root.classList.add("hidden");
    this.nodeId = null;
  }

  currentNode(): string | null {
    return this.nodeId;
  }
}

/** Color-coded list of the seven event types; clicking one highlights
 * matching nodes and zooms to them. Collapses on title click. */
export class LegendPanel {
  readonly root: HTMLDivElement;
  private list: HTMLUListElement;

  constructor(parent: HTMLElement, onFilter: (type: EventTypeName) => void) {
    this.root = document.createElement("div");
    this.root.className = "legend-panel";
    const title = document.createElement("h4");
    title.textContent = "Legend";
    title.addEventListener("click", () => this.list.classList.toggle("hidden"));
    this.list = document.createElement("ul");
    for (const type of TYPE_ORDER) {
      const item = document.createElement("li");
      item.dataset.type = type;
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = colorFor(type);
      item.append(swatch, document.createTextNode(type));
      item.addEventListener("click", () => onFilter(type));
      this.list.appendChild(item);
    }
    this.root.append(title, this.list);
    parent.appendChild(this.root);
  }
}
