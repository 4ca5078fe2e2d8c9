const KEYWORDS = new Set([
  "SELECT", "DISTINCT", "REDUCED", "WHERE", "FILTER", "NOT", "EXISTS",
  "SERVICE", "OPTIONAL", "PREFIX", "GROUP", "ORDER", "BY", "ASC", "DESC",
  "LIMIT", "OFFSET", "AS", "UNION", "BIND", "VALUES",
]);

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Keyword/variable/ID highlighting for the query editor's preview pane. */
export function highlightSparql(query: string): string {
  const pattern = /("(?:[^"\\]|\\.)*")|(\?[A-Za-z_][A-Za-z0-9_]*)|(#[^\n]*)|([A-Za-z_][A-Za-z0-9_-]*:[A-Za-z0-9_.-]*)|([A-Za-z_][A-Za-z0-9_]*)/g;
  let out = "";
  let last = 0;
  for (const match of query.matchAll(pattern)) {
    const index = match.index ?? 0;
    out += escapeHtml(query.slice(last, index));
    const [whole, str, variable, comment, pname, word] = match;
    if (str) {
      out += `<span class="tok-str">${escapeHtml(whole)}</span>`;
    } else if (variable) {
      out += `<span class="tok-var">${escapeHtml(whole)}</span>`;
    } else if (comment) {
      out += `<span class="tok-comment">${escapeHtml(whole)}</span>`;
    } else if (pname) {
      out += `<span class="tok-id">${escapeHtml(whole)}</span>`;
    } else if (word && KEYWORDS.has(word.toUpperCase())) {
      out += `<span class="tok-kw">${escapeHtml(whole)}</span>`;
    } else {
      out += escapeHtml(whole);
    }
    last = index + whole.length;
  }
  out += escapeHtml(query.slice(last));
  return out;
}
