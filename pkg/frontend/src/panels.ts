import type { SideTab } from "./state.js";
import type { RecordDoc, RelationshipTextDoc } from "./types.js";

export interface PanelCallbacks {
  onFocusRecord(recordId: string): void;
  onFocusEvent(eventId: string): void;
  onHighlightEvent(eventId: string | null): void;
  onAskQuestion(question: string): void;
}

/** Right-hand side panel: Descriptions and Relationships tabs over the
 * generation history, with inline event references and the collapsible
 * citation panel. Minimized to a button until opened (or `s`). */
export class SidePanel {
  private panel: HTMLDivElement;
  private toggleButton: HTMLButtonElement;
  private tabBar: HTMLDivElement;
  private content: HTMLDivElement;
  private open = false;
  private activeTab: SideTab = "descriptions";
  private records: RecordDoc[] = [];

  constructor(
    root: HTMLElement,
    private callbacks: PanelCallbacks,
  ) {
    this.toggleButton = document.createElement("button");
    this.toggleButton.className = "side-panel-toggle";
    this.toggleButton.textContent = "Panel";
    this.toggleButton.title = "Toggle side panel (s)";
    this.toggleButton.addEventListener("click", () => this.toggle());

    this.panel = document.createElement("div");
    this.panel.className = "side-panel hidden";

    this.tabBar = document.createElement("div");
    this.tabBar.className = "tab-bar";
    for (const tab of ["descriptions", "relationships"] as SideTab[]) {
      const button = document.createElement("button");
      button.dataset.tab = tab;
      button.textContent = tab === "descriptions" ? "Descriptions" : "Relationships";
      button.addEventListener("click", () => this.setTab(tab));
      this.tabBar.appendChild(button);
    }

    this.content = document.createElement("div");
    this.content.className = "panel-content";
    this.panel.append(this.tabBar, this.content);
    root.append(this.toggleButton, this.panel);
    this.renderTabs();
  }

  isOpen(): boolean {
    return this.open;
  }

  toggle(force?: boolean): void {
    this.open = force ?? !this.open;
    this.panel.classList.toggle("hidden", !this.open);
    this.toggleButton.classList.toggle("active", this.open);
  }

  setTab(tab: SideTab): void {
    this.activeTab = tab;
    this.renderTabs();
    this.renderRecords();
  }

  update(records: RecordDoc[]): void {
    this.records = records;
    this.renderRecords();
  }

  private renderTabs(): void {
    for (const button of this.tabBar.querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.tab === this.activeTab);
    }
  }

  private visibleRecords(): RecordDoc[] {
    const wanted =
      this.activeTab === "relationships"
        ? new Set(["Relationship"])
        : new Set(["Explain", "Questions", "Image"]);
    return this.records.filter((r) => wanted.has(r.kind)).reverse();
  }

  private renderRecords(): void {
    this.content.replaceChildren();
    for (const record of this.visibleRecords()) {
      this.content.appendChild(this.renderRecord(record));
    }
    if (!this.content.hasChildNodes()) {
      const empty = document.createElement("p");
      empty.className = "panel-empty";
      empty.textContent =
        this.activeTab === "relationships"
          ? "Relationship explanations will appear here."
          : "Explanations and answers will appear here.";
      this.content.appendChild(empty);
    }
  }

  private renderRecord(record: RecordDoc): HTMLElement {
    const card = document.createElement("article");
    card.className = "record-card";
    card.dataset.recordId = record.id;
    card.dataset.kind = record.kind;

    const title = document.createElement("h3");
    title.className = "record-title";
    title.textContent = record.title;
    title.title = "Show these events on the timeline";
    title.addEventListener("click", () => this.callbacks.onFocusRecord(record.id));
    card.appendChild(title);

    const text = record.parsed.text;
    if (record.kind === "Relationship" && text && typeof text !== "string") {
      card.appendChild(this.renderProse(text, record));
      if (record.parsed.note) {
        const note = document.createElement("p");
        note.className = "record-note";
        note.textContent = record.parsed.note;
        card.appendChild(note);
      }
    } else if (record.kind === "Explain") {
      card.appendChild(
        this.renderPlainProse(typeof text === "string" ? text : "", record),
      );
    } else if (record.kind === "Questions") {
      card.appendChild(this.renderQuestions(record.parsed.questions ?? []));
    } else if (record.kind === "Image" && record.parsed.locator) {
      const image = document.createElement("img");
      image.className = "record-image";
      image.src = record.parsed.locator;
      image.alt = record.title;
      card.appendChild(image);
    }

    const citations = renderCitationPanel(record);
    if (citations) {
      card.appendChild(citations);
    }
    return card;
  }

  /** Relationship prose with resolved references as clickable links. */
  private renderProse(text: RelationshipTextDoc, record: RecordDoc): HTMLElement {
    const paragraph = document.createElement("p");
    paragraph.className = "record-prose";
    let position = 0;
    for (const span of text.spans) {
      if (span.start > position) {
        paragraph.appendChild(
          withInlineMarkers(text.plain_text.slice(position, span.start), position, record),
        );
      }
      const reference = document.createElement("a");
      reference.className = span.event_id ? "event-ref" : "event-ref unresolved";
      reference.textContent = text.plain_text.slice(span.start, span.end);
      if (span.event_id) {
        const eventId = span.event_id;
        reference.addEventListener("click", () => this.callbacks.onFocusEvent(eventId));
        reference.addEventListener("mouseenter", () =>
          this.callbacks.onHighlightEvent(eventId),
        );
        reference.addEventListener("mouseleave", () =>
          this.callbacks.onHighlightEvent(null),
        );
      } else {
        reference.title = `Unresolved reference: ${span.name}`;
      }
      paragraph.appendChild(reference);
      position = span.end;
    }
    if (position < text.plain_text.length) {
      paragraph.appendChild(
        withInlineMarkers(text.plain_text.slice(position), position, record),
      );
    }
    return paragraph;
  }

  private renderPlainProse(text: string, record: RecordDoc): HTMLElement {
    const paragraph = document.createElement("p");
    paragraph.className = "record-prose";
    paragraph.appendChild(withInlineMarkers(text, 0, record));
    return paragraph;
  }

  private renderQuestions(questions: string[]): HTMLElement {
    const list = document.createElement("div");
    list.className = "question-chips";
    for (const question of questions) {
      const chip = document.createElement("button");
      chip.className = "question-chip";
      chip.textContent = question;
      chip.addEventListener("click", () => this.callbacks.onAskQuestion(question));
      list.appendChild(chip);
    }
    return list;
  }
}

/** Splice inline citation markers into a prose fragment.
 *
 * `offset` is where this fragment starts in the record's full prose, so
 * anchors can be matched against absolute positions.
 */
function withInlineMarkers(
  fragment: string,
  offset: number,
  record: RecordDoc,
): DocumentFragment {
  const result = document.createDocumentFragment();
  const anchored = record.citations
    .map((citation, index) => ({ citation, index }))
    .filter((entry) => entry.citation.anchor !== null)
    .map((entry) => ({
      at: entry.citation.anchor![1],
      index: entry.index,
      url: entry.citation.url,
      title: entry.citation.title,
    }))
    .filter((entry) => entry.at >= offset && entry.at <= offset + fragment.length)
    .sort((a, b) => a.at - b.at);
  let position = 0;
  for (const marker of anchored) {
    const local = marker.at - offset;
    result.appendChild(document.createTextNode(fragment.slice(position, local)));
    const sup = document.createElement("sup");
    const link = citationLink(marker.url, `[${marker.index + 1}]`, marker.title);
    link.classList.add("citation-marker");
    sup.appendChild(link);
    result.appendChild(sup);
    position = local;
  }
  result.appendChild(document.createTextNode(fragment.slice(position)));
  return result;
}

function validLocator(url: string): boolean {
  return /^https?:\/\//i.test(url);
}

function citationLink(url: string, label: string, title: string): HTMLElement {
  if (!validLocator(url)) {
    const dead = document.createElement("span");
    dead.className = "citation-link disabled";
    dead.textContent = label;
    dead.title = `No usable link for: ${title}`;
    return dead;
  }
  const link = document.createElement("a");
  link.className = "citation-link";
  link.href = url;
  link.target = "_blank";
  link.rel = "noopener noreferrer";
  link.textContent = label;
  link.title = title;
  return link;
}

/** Collapsible citation panel with a source-count badge; null when the
 * record has no citations. */
export function renderCitationPanel(record: RecordDoc): HTMLElement | null {
  if (record.citations.length === 0) {
    return null;
  }
  const details = document.createElement("details");
  details.className = "citation-panel";
  const summary = document.createElement("summary");
  summary.textContent = "Sources ";
  const badge = document.createElement("span");
  badge.className = "citation-badge";
  badge.textContent = String(record.citations.length);
  summary.appendChild(badge);
  details.appendChild(summary);
  const list = document.createElement("ul");
  for (const citation of record.citations) {
    const item = document.createElement("li");
    item.appendChild(citationLink(citation.url, citation.title, citation.title));
    list.appendChild(item);
  }
  details.appendChild(list);
  return details;
}
