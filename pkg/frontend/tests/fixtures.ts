import type {
  ChatMessage,
  MessageDelta,
  PreviewBundle,
  QueryGraph,
  RunResult,
} from "../src/types.js";

export const MOUNTAINS_QUERY = [
  "SELECT ?mountain ?mountainLabel ?height",
  "WHERE {",
  "  ?mountain wdt:P31 wd:Q8502;",
  "  wdt:P2044 ?height.",
  "}",
].join("\n");

export const MOUNTAINS_GRAPH: QueryGraph = {
  provenance: "kg",
  nodes: [
    { key: "?mountain", displayLabel: "mountain", kind: "variable" },
    { key: "wd:Q8502", displayLabel: "wd:Q8502 (mountain)", kind: "knownEntity" },
    { key: "?height", displayLabel: "height", kind: "variable" },
  ],
  edges: [
    {
      source: "?mountain",
      target: "wd:Q8502",
      propertyRef: "P31",
      displayLabel: "wdt:P31 (instance of)",
    },
    {
      source: "?mountain",
      target: "?height",
      propertyRef: "P2044",
      displayLabel: "wdt:P2044 (elevation above sea level)",
    },
  ],
};

export const MOUNTAINS_BUNDLE: PreviewBundle = {
  query: MOUNTAINS_QUERY,
  validation: { ok: true },
  entityRelationRows: {
    provenance: "kg",
    rows: [
      {
        id: "Q8502",
        kind: "entity",
        label: "mountain",
        description: "large landform that rises above the surrounding land",
      },
      { id: "P31", kind: "property", label: "instance of", description: "is one of" },
      {
        id: "P2044",
        kind: "property",
        label: "elevation above sea level",
        description: "height relative to sea level",
      },
    ],
  },
  queryGraph: MOUNTAINS_GRAPH,
  labelsUnavailable: false,
};

export const INVALID_BUNDLE: PreviewBundle = {
  query: "SELECT ?x WHERE {",
  validation: {
    ok: false,
    error: { position: 17, line: 1, column: 18, message: "unclosed group: expected '}'" },
  },
  entityRelationRows: { provenance: "kg", rows: [] },
  queryGraph: null,
  labelsUnavailable: false,
};

export function message(
  role: ChatMessage["role"],
  content: string,
  visibility: ChatMessage["visibility"] = "shown",
  provenance: ChatMessage["provenance"] = role === "user" ? "user" : "llm",
): ChatMessage {
  return { role, content, timestamp: "2024-05-01T12:00:00Z", visibility, provenance };
}

export function deltaWithQuery(query: string): MessageDelta {
  return {
    state: "AwaitingUserRunDecision",
    messages: [
      message("user", "tallest mountains?"),
      message("assistant", "BUILD QUERY", "internalProtocol"),
      message("system", "ENTITY SEARCH: mountain", "internalProtocol", "kg"),
      message("assistant", "Here is a query for the tallest mountains."),
    ],
    generatedQuery: { text: query, provenance: "llm" },
    explanation: { text: "Finds mountains by height.", provenance: "llm" },
    resolutionStalled: false,
    error: null,
  };
}

export function runResult(rows: string[][], summary: string | null): RunResult {
  return {
    query: MOUNTAINS_QUERY,
    table: {
      provenance: "kg",
      columns: ["mountain", "mountainLabel", "height"],
      rows,
      sourceRowCount: rows.length,
    },
    summary: summary === null ? null : { text: summary, provenance: "llm" },
    summaryError: null,
    csv: "/sessions/s1/results/latest.csv",
  };
}

/** In-memory stand-in for the session service, served through fetch. */
export class StubService {
  calls: { method: string; path: string; body: unknown }[] = [];
  bundle: PreviewBundle = MOUNTAINS_BUNDLE;
  delta: MessageDelta = deltaWithQuery(MOUNTAINS_QUERY);
  result: RunResult = runResult(
    [
      ["Q513", "Mount Everest", "8848.86"],
      ["Q43512", "K2", "8611"],
    ],
    "Everest is the tallest.",
  );
  gate: Promise<void> | null = null;

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.calls.push({ method, path: input, body });
    if (this.gate) {
      await this.gate;
    }
    const respond = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    if (input.endsWith("/sessions") && method === "POST") {
      return respond({ sessionId: "s1" });
    }
    if (input.endsWith("/messages")) {
      return respond(this.delta);
    }
    if (input.endsWith("/preview")) {
      return respond(this.bundle);
    }
    if (input.endsWith("/run")) {
      return respond(this.result);
    }
    if (input.includes("/history")) {
      return respond({
        history: [
          {
            query: MOUNTAINS_QUERY,
            origin: "llmGenerated",
            createdAt: "2024-05-01T12:00:00Z",
            executed: false,
          },
        ],
      });
    }
    if (input.includes("/transcript")) {
      return respond({ messages: [] });
    }
    return respond({ error: { type: "NotFound", message: input } }, 404);
  };
}
