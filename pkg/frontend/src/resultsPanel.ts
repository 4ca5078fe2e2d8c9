import { provenanceBackgrounds } from "./theme.js";
import type { RunResult } from "./types.js";

export const PAGE_SIZE = 100;

/** Results view: sortable paginated table (KG-styled), CSV download, and the
 * model's summary (LLM-styled). Empty results foreground the diagnosis. */
export class ResultsPanel {
  readonly root: HTMLElement;
  private readonly summaryBox: HTMLElement;
  private readonly tableBox: HTMLElement;
  private readonly pager: HTMLElement;
  private readonly downloadLink: HTMLAnchorElement;
  private result: RunResult | null = null;
  private sortColumn = -1;
  private sortAscending = true;
  private page = 0;

  constructor() {
    this.root = document.createElement("section");
    this.root.className = "panel results-panel";
    this.root.innerHTML = `
      <header>
        <h2>Results</h2>
        <a class="csv-download" download="results.csv" hidden>Download CSV</a>
      </header>
      <div class="summary-box"></div>
      <div class="results-table"></div>
      <div class="results-pager"></div>`;
    this.summaryBox = this.root.querySelector(".summary-box")!;
    this.tableBox = this.root.querySelector(".results-table")!;
    this.pager = this.root.querySelector(".results-pager")!;
    this.downloadLink = this.root.querySelector(".csv-download")!;
  }

  showResult(result: RunResult, csvUrl: string): void {
    this.result = result;
    this.sortColumn = -1;
    this.page = 0;
    this.downloadLink.href = csvUrl;
    this.downloadLink.hidden = false;

    this.summaryBox.innerHTML = "";
    const summary = document.createElement("p");
    summary.className = "llm-summary";
    summary.style.background = provenanceBackgrounds.llm;
    if (result.summary) {
      summary.textContent = result.summary.text;
    } else if (result.summaryError) {
      summary.textContent = `Summary unavailable: ${result.summaryError}`;
    }
    if (result.table.rows.length === 0) {
      // Empty result: the diagnosis is the headline.
      summary.classList.add("llm-summary-diagnosis");
      const notice = document.createElement("p");
      notice.className = "empty-result-notice";
      notice.textContent = "The query returned no results.";
      this.summaryBox.appendChild(notice);
    }
    if (summary.textContent) {
      this.summaryBox.appendChild(summary);
    }
    this.renderTable();
  }

  private sortedRows(): string[][] {
    const rows = this.result ? [...this.result.table.rows] : [];
    if (this.sortColumn < 0) return rows;
    const index = this.sortColumn;
    const ascending = this.sortAscending ? 1 : -1;
    return rows.sort((a, b) => {
      const left = a[index] ?? "";
      const right = b[index] ?? "";
      const leftNum = Number(left);
      const rightNum = Number(right);
      if (!Number.isNaN(leftNum) && !Number.isNaN(rightNum) && left !== "" && right !== "") {
        return (leftNum - rightNum) * ascending;
      }
      return left.localeCompare(right) * ascending;
    });
  }

  private renderTable(): void {
    if (!this.result) return;
    const { columns } = this.result.table;
    const rows = this.sortedRows();
    const start = this.page * PAGE_SIZE;
    const pageRows = rows.slice(start, start + PAGE_SIZE);

    this.tableBox.innerHTML = "";
    const table = document.createElement("table");
    table.className = "data-table";
    table.style.background = provenanceBackgrounds.kg;
    const head = document.createElement("tr");
    columns.forEach((column, index) => {
      const th = document.createElement("th");
      th.textContent = column;
      th.className = "sortable";
      th.addEventListener("click", () => {
        this.sortAscending = this.sortColumn === index ? !this.sortAscending : true;
        this.sortColumn = index;
        this.renderTable();
      });
      head.appendChild(th);
    });
    const thead = document.createElement("thead");
    thead.appendChild(head);
    table.appendChild(thead);
    const body = document.createElement("tbody");
    for (const row of pageRows) {
      const tr = document.createElement("tr");
      for (const cell of row) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      body.appendChild(tr);
    }
    table.appendChild(body);
    this.tableBox.appendChild(table);
    this.renderPager(rows.length);
  }

  private renderPager(total: number): void {
    this.pager.innerHTML = "";
    const pages = Math.max(1, Math.ceil(total / PAGE_SIZE));
    if (pages <= 1) return;
    const previous = document.createElement("button");
    previous.textContent = "prev";
    previous.disabled = this.page === 0;
    previous.addEventListener("click", () => {
      this.page -= 1;
      this.renderTable();
    });
    const status = document.createElement("span");
    status.className = "pager-status";
    status.textContent = ` page ${this.page + 1} / ${pages} (${total} rows) `;
    const next = document.createElement("button");
    next.textContent = "next";
    next.disabled = this.page >= pages - 1;
    next.addEventListener("click", () => {
      this.page += 1;
      this.renderTable();
    });
    this.pager.append(previous, status, next);
  }
}
