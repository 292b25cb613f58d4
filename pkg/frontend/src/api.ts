import type {
  EventsResponse,
  ExplainResponse,
  FocusResponse,
  LayoutDoc,
  QuestionsResponse,
  RecordDoc,
  RelationshipResponse,
  SessionDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorType: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let errorType = "HttpError";
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      errorType = body.error ?? errorType;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, errorType, detail);
}

/** Thin typed client over the service's HTTP surface. */
export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("POST", "/sessions");
    return body.session_id;
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.request("GET", `/sessions/${id}`);
  }

  generateEvents(
    id: string,
    body: {
      topic?: string;
      context?: string;
      source_node?: string;
      num_of_topics?: number;
      num_of_margin?: number;
    },
  ): Promise<EventsResponse> {
    return this.request("POST", `/sessions/${id}/events`, body);
  }

  explain(
    id: string,
    body: { topic?: string; context?: string; node?: string },
  ): Promise<ExplainResponse> {
    return this.request("POST", `/sessions/${id}/explain`, body);
  }

  questions(id: string, body: { topic: string; context?: string }): Promise<QuestionsResponse> {
    return this.request("POST", `/sessions/${id}/questions`, body);
  }

  relationship(id: string, nodeIds: string[]): Promise<RelationshipResponse> {
    return this.request("POST", `/sessions/${id}/relationship`, { node_ids: nodeIds });
  }

  moveNode(id: string, nodeId: string, x: number, y: number): Promise<unknown> {
    return this.request("PATCH", `/sessions/${id}/nodes/${nodeId}`, { x, y });
  }

  deleteNode(id: string, nodeId: string): Promise<unknown> {
    return this.request("DELETE", `/sessions/${id}/nodes/${nodeId}`);
  }

  layout(id: string, zoom: number): Promise<LayoutDoc> {
    return this.request("GET", `/sessions/${id}/layout?zoom=${zoom}`);
  }

  focusRecord(id: string, recordId: string): Promise<FocusResponse> {
    return this.request("POST", `/sessions/${id}/focus`, { record_id: recordId });
  }

  focusEvent(id: string, eventId: string): Promise<FocusResponse> {
    return this.request("POST", `/sessions/${id}/focus`, { event_id: eventId });
  }

  filterType(id: string, eventType: string): Promise<FocusResponse> {
    return this.request("POST", `/sessions/${id}/focus`, { event_type: eventType });
  }

  records(id: string): Promise<{ records: RecordDoc[] }> {
    return this.request("GET", `/sessions/${id}/records`);
  }

  save(id: string): Promise<{ path: string }> {
    return this.request("POST", `/sessions/${id}/save`, {});
  }
}
