/** Wire types mirroring the service's JSON documents. */

export type EventTypeName =
  | "Theory"
  | "Discovery"
  | "Invention"
  | "Politics"
  | "Art"
  | "Economics"
  | "Other";

export type RecordKindName =
  | "Events"
  | "Explain"
  | "Questions"
  | "Relationship"
  | "Image";

export interface EventDoc {
  id: string;
  name: string;
  year: number;
  event_type: EventTypeName;
  short_summary: string | null;
  explanation: string | null;
  origin: string | null;
}

export interface PlacementDoc {
  event_id: string;
  x: number;
  y: number;
  pinned: boolean;
}

export interface EdgeDoc {
  id: string;
  kind: "Provenance" | "Relationship";
  from_node: string;
  to_node: string;
  record?: string;
}

export interface CitationDoc {
  title: string;
  url: string;
  anchor: [number, number] | null;
}

export interface SpanDoc {
  start: number;
  end: number;
  display: string;
  name: string;
  event_id: string | null;
}

export interface RelationshipTextDoc {
  plain_text: string;
  spans: SpanDoc[];
}

export interface RecordDoc {
  id: string;
  kind: RecordKindName;
  topic: string;
  context: string;
  subevents: string[] | null;
  raw_output: string;
  parsed: {
    /** RelationshipTextDoc on Relationship records, plain string on Explain */
    text?: RelationshipTextDoc | string;
    event_ids?: string[];
    events_raw?: string | null;
    note?: string | null;
    node_id?: string | null;
    questions?: string[];
    locator?: string;
  };
  citations: CitationDoc[];
  title: string;
  created_at: string;
  latency_ms: number;
}

export interface ScaleDoc {
  min_year: number;
  max_year: number;
  pixels_per_year: number;
}

export interface SessionDoc {
  schema_version: number;
  session_id: string;
  events: Record<string, EventDoc>;
  placements: Record<string, PlacementDoc>;
  edges: EdgeDoc[];
  scale: ScaleDoc | null;
  records: RecordDoc[];
  selection: string[];
}

export interface LayoutNodeDoc {
  event_id: string;
  x: number;
  y: number;
  mode: "full" | "dot";
  opacity: number;
  label: string;
}

export interface TickDoc {
  year: number;
  x: number;
  label: string;
}

export interface LayoutDoc {
  nodes: LayoutNodeDoc[];
  edges: EdgeDoc[];
  ticks: TickDoc[];
  scale: ScaleDoc | null;
}

export interface ViewportDoc {
  center_x: number;
  center_y: number;
  zoom: number;
  width: number;
  height: number;
}

export interface EventsResponse {
  events: EventDoc[];
  edges: EdgeDoc[];
  record: RecordDoc | null;
  warnings: string[];
}

export interface ExplainResponse {
  record: RecordDoc;
  warnings: string[];
}

export interface QuestionsResponse {
  questions: string[];
  record: RecordDoc;
}

export interface RelationshipResponse {
  record: RecordDoc;
  edges: EdgeDoc[];
}

export interface FocusResponse {
  viewport: ViewportDoc | null;
  opacity?: Record<string, number>;
  highlight?: string[];
}
