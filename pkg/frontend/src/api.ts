import type {
  ChatMessage,
  HistoryEntry,
  MessageDelta,
  PreviewBundle,
  RunResult,
} from "./types.js";

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client over the session service. The UI holds no credentials and
 * performs no direct KG or model calls; everything goes through here. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      const detail = payload?.error?.message ?? response.statusText;
      throw new Error(detail);
    }
    return payload as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ sessionId: string }>("POST", "/sessions");
    return body.sessionId;
  }

  postMessage(sessionId: string, text: string): Promise<MessageDelta> {
    return this.request("POST", `/sessions/${sessionId}/messages`, { text });
  }

  preview(sessionId: string, query: string): Promise<PreviewBundle> {
    return this.request("POST", `/sessions/${sessionId}/preview`, { query });
  }

  run(sessionId: string, query: string): Promise<RunResult> {
    return this.request("POST", `/sessions/${sessionId}/run`, { query });
  }

  async history(sessionId: string): Promise<HistoryEntry[]> {
    const body = await this.request<{ history: HistoryEntry[] }>(
      "GET",
      `/sessions/${sessionId}/history`,
    );
    return body.history;
  }

  async transcript(sessionId: string, includeInternal: boolean): Promise<ChatMessage[]> {
    const body = await this.request<{ messages: ChatMessage[] }>(
      "GET",
      `/sessions/${sessionId}/transcript?includeInternal=${includeInternal}`,
    );
    return body.messages;
  }

  csvUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/results/latest.csv`;
  }
}
