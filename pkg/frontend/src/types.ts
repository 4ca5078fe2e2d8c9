/** Wire types for the session service API. */

export type Provenance = "user" | "llm" | "kg" | "system";

export interface ChatMessage {
  role: "user" | "assistant" | "system";
  content: string;
  timestamp: string;
  visibility: "shown" | "internalProtocol";
  provenance: Provenance;
}

export interface TaggedText {
  text: string;
  provenance: Provenance;
}

export interface MessageDelta {
  state: string;
  messages: ChatMessage[];
  generatedQuery: TaggedText | null;
  explanation: TaggedText | null;
  resolutionStalled: boolean;
  error: { type: string; message: string } | null;
}

export interface ValidationError {
  position: number;
  line: number;
  column: number;
  message: string;
}

export interface EntityRelationRow {
  id: string;
  kind: "entity" | "property";
  label: string;
  description: string;
}

export type NodeKind = "knownEntity" | "variable" | "literal";

export interface GraphNode {
  key: string;
  displayLabel: string;
  kind: NodeKind;
}

export interface GraphEdge {
  source: string;
  target: string;
  propertyRef: string;
  displayLabel: string;
}

export interface QueryGraph {
  provenance: Provenance;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface PreviewBundle {
  query: string;
  validation: { ok: true } | { ok: false; error: ValidationError };
  entityRelationRows: { provenance: Provenance; rows: EntityRelationRow[] };
  queryGraph: QueryGraph | null;
  labelsUnavailable: boolean;
}

export interface RunResult {
  query: string;
  table: {
    provenance: Provenance;
    columns: string[];
    rows: string[][];
    sourceRowCount: number;
  };
  summary: TaggedText | null;
  summaryError: string | null;
  csv: string;
}

export interface HistoryEntry {
  query: string;
  origin: "llmGenerated" | "userEdited";
  createdAt: string;
  executed: boolean;
}
