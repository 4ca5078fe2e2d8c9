import { renderQueryGraph } from "./graphView.js";
import { highlightSparql } from "./highlight.js";
import { errorColor, provenanceBackgrounds } from "./theme.js";
import type { HistoryEntry, PreviewBundle } from "./types.js";

export interface PreviewPanelHandlers {
  onPreview: (query: string) => void;
  onRun: (query: string) => void;
}

/** Query editor, entity-relation table, and query graph. Editor content is
 * its own state: generated queries only arrive here via an explicit copy. */
export class PreviewPanel {
  readonly root: HTMLElement;
  private readonly editor: HTMLTextAreaElement;
  private readonly highlightPane: HTMLElement;
  private readonly validationBox: HTMLElement;
  private readonly tableBox: HTMLElement;
  private readonly graphBox: HTMLElement;
  private readonly historySelect: HTMLSelectElement;

  constructor(private readonly handlers: PreviewPanelHandlers) {
    this.root = document.createElement("section");
    this.root.className = "panel preview-panel";
    this.root.innerHTML = `
      <header>
        <h2>Query preview</h2>
        <select class="query-history"><option value="">history...</option></select>
      </header>
      <div class="editor-wrap">
        <pre class="editor-highlight" aria-hidden="true"></pre>
        <textarea class="query-editor" rows="10" spellcheck="false"></textarea>
      </div>
      <div class="validation-message"></div>
      <div class="editor-actions">
        <button class="preview-button">Preview</button>
        <button class="run-button">Run query</button>
      </div>
      <div class="entity-relation"></div>
      <div class="graph-box"></div>`;
    this.editor = this.root.querySelector(".query-editor")!;
    this.highlightPane = this.root.querySelector(".editor-highlight")!;
    this.validationBox = this.root.querySelector(".validation-message")!;
    this.tableBox = this.root.querySelector(".entity-relation")!;
    this.graphBox = this.root.querySelector(".graph-box")!;
    this.historySelect = this.root.querySelector(".query-history")!;

    this.editor.addEventListener("input", () => this.refreshHighlight());
    this.root
      .querySelector(".preview-button")!
      .addEventListener("click", () => this.handlers.onPreview(this.editor.value));
    this.root
      .querySelector(".run-button")!
      .addEventListener("click", () => this.handlers.onRun(this.editor.value));
    this.historySelect.addEventListener("change", () => {
      if (this.historySelect.value) {
        this.setEditorContent(this.historySelect.value);
      }
    });
  }

  get editorContent(): string {
    return this.editor.value;
  }

  /** Explicit copy action; nothing else writes into the editor. */
  setEditorContent(query: string): void {
    this.editor.value = query;
    this.refreshHighlight();
  }

  private refreshHighlight(): void {
    this.highlightPane.innerHTML = highlightSparql(this.editor.value);
  }

  setHistory(entries: HistoryEntry[]): void {
    this.historySelect.innerHTML = `<option value="">history...</option>`;
    for (const entry of entries.slice().reverse()) {
      const option = document.createElement("option");
      option.value = entry.query;
      const flag = entry.executed ? " (run)" : "";
      option.textContent = `${entry.origin}${flag}: ${entry.query.split("\n")[0].slice(0, 48)}`;
      this.historySelect.appendChild(option);
    }
  }

  showBundle(bundle: PreviewBundle): void {
    if (!bundle.validation.ok) {
      const error = bundle.validation.error;
      this.validationBox.style.color = errorColor;
      this.validationBox.textContent =
        `Syntax error at line ${error.line}, column ${error.column}: ${error.message}`;
      this.tableBox.innerHTML = "";
      this.graphBox.innerHTML = "";
      return;
    }
    this.validationBox.style.color = "";
    this.validationBox.textContent = bundle.labelsUnavailable
      ? "Query is valid. Labels unavailable: knowledge graph unreachable."
      : "Query is valid.";
    this.renderRows(bundle);
    this.graphBox.innerHTML = "";
    this.graphBox.appendChild(renderQueryGraph(bundle.queryGraph));
  }

  clearBundle(): void {
    this.validationBox.textContent = "";
    this.tableBox.innerHTML = "";
    this.graphBox.innerHTML = "";
  }

  private renderRows(bundle: PreviewBundle): void {
    const rows = bundle.entityRelationRows.rows;
    this.tableBox.innerHTML = "";
    if (rows.length === 0) {
      const hint = document.createElement("p");
      hint.className = "table-hint";
      hint.textContent = "No Wikidata identifiers in this query.";
      this.tableBox.appendChild(hint);
      return;
    }
    const table = document.createElement("table");
    table.className = "entity-relation-table";
    table.style.background = provenanceBackgrounds.kg;
    table.innerHTML =
      "<thead><tr><th>ID</th><th>Kind</th><th>Label</th><th>Description</th></tr></thead>";
    const body = document.createElement("tbody");
    for (const row of rows) {
      const tr = document.createElement("tr");
      for (const cell of [row.id, row.kind, row.label, row.description]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      body.appendChild(tr);
    }
    table.appendChild(body);
    this.tableBox.appendChild(table);
  }
}
