import { beforeEach, describe, expect, it, vi } from "vitest";

import { highlightSparql } from "../src/highlight.js";
import { PreviewPanel } from "../src/previewPanel.js";
import { INVALID_BUNDLE, MOUNTAINS_BUNDLE, MOUNTAINS_QUERY } from "./fixtures.js";

function makePanel() {
  const handlers = { onPreview: vi.fn(), onRun: vi.fn() };
  const panel = new PreviewPanel(handlers);
  document.body.appendChild(panel.root);
  return { panel, handlers };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("entity-relation table and graph", () => {
  it("lists every id with label and description", () => {
    const { panel } = makePanel();
    panel.showBundle(MOUNTAINS_BUNDLE);
    const rows = panel.root.querySelectorAll(".entity-relation-table tbody tr");
    expect(rows.length).toBe(3);
    expect(rows[0].textContent).toContain("Q8502");
    expect(rows[0].textContent).toContain("mountain");
    expect(rows[2].textContent).toContain("elevation above sea level");
    expect(panel.root.querySelectorAll(".graph-box circle").length).toBe(3);
  });

  it("shows the inline validation error and clears table and graph", () => {
    const { panel } = makePanel();
    panel.showBundle(MOUNTAINS_BUNDLE);
    panel.showBundle(INVALID_BUNDLE);
    const validation = panel.root.querySelector(".validation-message")!;
    expect(validation.textContent).toContain("line 1, column 18");
    expect(validation.textContent).toContain("unclosed group");
    expect(panel.root.querySelectorAll(".entity-relation-table").length).toBe(0);
    expect(panel.root.querySelectorAll(".graph-box circle").length).toBe(0);
  });

  it("shows a hint when the query has no identifiers", () => {
    const { panel } = makePanel();
    panel.showBundle({
      ...MOUNTAINS_BUNDLE,
      entityRelationRows: { provenance: "kg", rows: [] },
      queryGraph: { provenance: "kg", nodes: [], edges: [] },
    });
    expect(panel.root.querySelector(".table-hint")!.textContent).toContain(
      "No Wikidata identifiers",
    );
  });
});

describe("editor state", () => {
  it("only the explicit copy action changes editor content", () => {
    const { panel } = makePanel();
    panel.setEditorContent("my draft edit");
    // A new generated query arriving elsewhere must not touch the editor.
    expect(panel.editorContent).toBe("my draft edit");
    panel.setEditorContent(MOUNTAINS_QUERY);
    expect(panel.editorContent).toBe(MOUNTAINS_QUERY);
  });

  it("preview and run act on the editor content", () => {
    const { panel, handlers } = makePanel();
    panel.setEditorContent(MOUNTAINS_QUERY);
    panel.root.querySelector<HTMLButtonElement>(".preview-button")!.click();
    expect(handlers.onPreview).toHaveBeenCalledWith(MOUNTAINS_QUERY);
    panel.root.querySelector<HTMLButtonElement>(".run-button")!.click();
    expect(handlers.onRun).toHaveBeenCalledWith(MOUNTAINS_QUERY);
  });

  it("history dropdown loads a past query into the editor", () => {
    const { panel } = makePanel();
    panel.setHistory([
      {
        query: "SELECT ?a WHERE { ?a ?b ?c . }",
        origin: "llmGenerated",
        createdAt: "2024-05-01T12:00:00Z",
        executed: true,
      },
    ]);
    const select = panel.root.querySelector<HTMLSelectElement>(".query-history")!;
    expect(select.options.length).toBe(2);
    select.value = "SELECT ?a WHERE { ?a ?b ?c . }";
    select.dispatchEvent(new Event("change"));
    expect(panel.editorContent).toBe("SELECT ?a WHERE { ?a ?b ?c . }");
  });
});

describe("keyword highlighting", () => {
  it("wraps keywords, variables, ids, and strings", () => {
    const html = highlightSparql('SELECT ?x WHERE { wd:Q312 rdfs:label "Apple" . }');
    expect(html).toContain('<span class="tok-kw">SELECT</span>');
    expect(html).toContain('<span class="tok-kw">WHERE</span>');
    expect(html).toContain('<span class="tok-var">?x</span>');
    expect(html).toContain('<span class="tok-id">wd:Q312</span>');
    expect(html).toContain('<span class="tok-str">&quot;Apple&quot;</span>');
  });

  it("escapes html in query text", () => {
    const html = highlightSparql("SELECT ?x WHERE { ?x ?p <script>alert(1)</script> }");
    expect(html).not.toContain("<script>");
  });
});
