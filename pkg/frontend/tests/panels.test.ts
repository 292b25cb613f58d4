import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderCitationPanel, SidePanel } from "../src/panels.js";
import type { RecordDoc } from "../src/types.js";

function record(overrides: Partial<RecordDoc>): RecordDoc {
  return {
    id: "r1",
    kind: "Explain",
    topic: "t",
    context: "c",
    subevents: null,
    raw_output: "",
    parsed: {},
    citations: [],
    title: "A title",
    created_at: "2024-01-01T00:00:00+00:00",
    latency_ms: 1,
    ...overrides,
  };
}

describe("citation panel", () => {
  it("is absent without citations", () => {
    expect(renderCitationPanel(record({}))).toBeNull();
  });

  it("shows a badge with the source count and opens links in a new tab", () => {
    const panel = renderCitationPanel(
      record({
        citations: [
          { title: "Source A", url: "https://a.example", anchor: null },
          { title: "Source B", url: "https://b.example", anchor: [0, 4] },
        ],
      }),
    )!;
    expect(panel.querySelector(".citation-badge")?.textContent).toBe("2");
    const links = [...panel.querySelectorAll("a.citation-link")];
    expect(links).toHaveLength(2);
    for (const link of links) {
      expect(link.getAttribute("target")).toBe("_blank");
      expect(link.getAttribute("rel")).toContain("noopener");
    }
  });

  it("renders unusable locators as disabled entries with a tooltip", () => {
    const panel = renderCitationPanel(
      record({ citations: [{ title: "Broken", url: "not-a-url", anchor: null }] }),
    )!;
    const dead = panel.querySelector(".citation-link.disabled")!;
    expect(dead.tagName).toBe("SPAN");
    expect(dead.getAttribute("title")).toContain("Broken");
  });
});

describe("side panel", () => {
  let root: HTMLElement;
  let callbacks: {
    onFocusRecord: ReturnType<typeof vi.fn>;
    onFocusEvent: ReturnType<typeof vi.fn>;
    onHighlightEvent: ReturnType<typeof vi.fn>;
    onAskQuestion: ReturnType<typeof vi.fn>;
  };
  let panel: SidePanel;

  beforeEach(() => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.appendChild(root);
    callbacks = {
      onFocusRecord: vi.fn(),
      onFocusEvent: vi.fn(),
      onHighlightEvent: vi.fn(),
      onAskQuestion: vi.fn(),
    };
    panel = new SidePanel(root, callbacks);
    panel.toggle(true);
  });

  it("routes records to the right tab", () => {
    panel.update([
      record({ id: "e1", kind: "Explain", title: "Explанation", parsed: { text: "prose" } }),
      record({
        id: "rel1",
        kind: "Relationship",
        title: "Rel",
        parsed: { text: { plain_text: "plain", spans: [] }, event_ids: [] },
      }),
    ]);
    panel.setTab("descriptions");
    expect(root.querySelectorAll(".record-card")).toHaveLength(1);
    expect(root.querySelector(".record-card")?.getAttribute("data-kind")).toBe("Explain");
    panel.setTab("relationships");
    expect(root.querySelector(".record-card")?.getAttribute("data-kind")).toBe(
      "Relationship",
    );
  });

  it("newest record comes first", () => {
    panel.update([
      record({ id: "a", title: "first", parsed: { text: "1" } }),
      record({ id: "b", title: "second", parsed: { text: "2" } }),
    ]);
    panel.setTab("descriptions");
    const titles = [...root.querySelectorAll(".record-title")].map((n) => n.textContent);
    expect(titles).toEqual(["second", "first"]);
  });

  it("clicking a title focuses the record", () => {
    panel.update([record({ id: "rec9", parsed: { text: "x" } })]);
    panel.setTab("descriptions");
    (root.querySelector(".record-title") as HTMLElement).click();
    expect(callbacks.onFocusRecord).toHaveBeenCalledWith("rec9");
  });

  it("resolved references are clickable and highlight on hover", () => {
    panel.update([
      record({
        id: "rel1",
        kind: "Relationship",
        parsed: {
          text: {
            plain_text: "The conquest reshaped Mexico.",
            spans: [
              { start: 4, end: 12, display: "conquest", name: "The Conquest", event_id: "e77" },
              { start: 22, end: 28, display: "Mexico", name: "Unknown", event_id: null },
            ],
          },
          event_ids: [],
        },
      }),
    ]);
    panel.setTab("relationships");
    const refs = [...root.querySelectorAll(".event-ref")];
    expect(refs.map((r) => r.textContent)).toEqual(["conquest", "Mexico"]);
    (refs[0] as HTMLElement).click();
    expect(callbacks.onFocusEvent).toHaveBeenCalledWith("e77");
    refs[0].dispatchEvent(new MouseEvent("mouseenter"));
    expect(callbacks.onHighlightEvent).toHaveBeenCalledWith("e77");
    expect(refs[1].classList.contains("unresolved")).toBe(true);
    (refs[1] as HTMLElement).click();
    expect(callbacks.onFocusEvent).toHaveBeenCalledTimes(1);
  });

  it("question records render as clickable chips", () => {
    panel.update([
      record({
        id: "q1",
        kind: "Questions",
        parsed: { questions: ["Why A?", "Why B?"] },
      }),
    ]);
    panel.setTab("descriptions");
    const chips = [...root.querySelectorAll(".question-chip")];
    expect(chips).toHaveLength(2);
    (chips[1] as HTMLElement).click();
    expect(callbacks.onAskQuestion).toHaveBeenCalledWith("Why B?");
  });

  it("inline markers appear at citation anchors", () => {
    panel.update([
      record({
        id: "e1",
        kind: "Explain",
        parsed: { text: "The Age of Discovery was long." },
        citations: [
          { title: "Src", url: "https://src.example", anchor: [4, 20] },
        ],
      }),
    ]);
    panel.setTab("descriptions");
    const marker = root.querySelector("sup .citation-marker");
    expect(marker).not.toBeNull();
    expect(marker?.textContent).toBe("[1]");
    const prose = root.querySelector(".record-prose")!;
    expect(prose.textContent).toContain("Age of Discovery");
  });
});
