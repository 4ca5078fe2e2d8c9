import { ApiClient } from "./api.js";
import { ChatPanel } from "./chatPanel.js";
import { PreviewPanel } from "./previewPanel.js";
import { ResultsPanel } from "./resultsPanel.js";

/** Wires the three panels to the session service. At most one protocol
 * request is in flight per session: send is disabled while working. */
export class App {
  readonly root: HTMLElement;
  readonly chat: ChatPanel;
  readonly preview: PreviewPanel;
  readonly results: ResultsPanel;
  private sessionId: string | null = null;
  private busy = false;

  constructor(private readonly api: ApiClient) {
    this.chat = new ChatPanel({
      onSend: (text) => void this.sendMessage(text),
      onCopyToEditor: (query) => this.preview.setEditorContent(query),
      onCopyAndRun: (query) => {
        this.preview.setEditorContent(query);
        void this.runQuery(query);
      },
    });
    this.preview = new PreviewPanel({
      onPreview: (query) => void this.previewQuery(query),
      onRun: (query) => void this.runQuery(query),
    });
    this.results = new ResultsPanel();
    this.root = document.createElement("main");
    this.root.className = "three-panels";
    this.root.append(this.chat.root, this.preview.root, this.results.root);
  }

  async start(): Promise<void> {
    this.sessionId = await this.api.createSession();
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.chat.setBusy(busy);
  }

  async sendMessage(text: string): Promise<void> {
    if (!this.sessionId || this.busy) return;
    this.setBusy(true);
    try {
      const delta = await this.api.postMessage(this.sessionId, text);
      this.chat.addMessages(delta.messages);
      if (delta.error) {
        this.chat.addError(`${delta.error.type}: ${delta.error.message}`);
      }
      if (delta.generatedQuery) {
        // Display only; the editor keeps whatever the user was writing.
        this.chat.showGeneratedQuery(delta.generatedQuery.text);
      }
      await this.refreshHistory();
    } catch (error) {
      this.chat.addError(String(error));
    } finally {
      this.setBusy(false);
    }
  }

  async previewQuery(query: string): Promise<void> {
    if (!this.sessionId) return;
    try {
      const bundle = await this.api.preview(this.sessionId, query);
      this.preview.showBundle(bundle);
    } catch (error) {
      this.chat.addError(String(error));
    }
  }

  async runQuery(query: string): Promise<void> {
    if (!this.sessionId) return;
    this.setBusy(true);
    try {
      await this.previewQuery(query);
      const result = await this.api.run(this.sessionId, query);
      this.results.showResult(result, this.api.csvUrl(this.sessionId));
      await this.refreshHistory();
    } catch (error) {
      this.chat.addError(String(error));
    } finally {
      this.setBusy(false);
    }
  }

  private async refreshHistory(): Promise<void> {
    if (!this.sessionId) return;
    this.preview.setHistory(await this.api.history(this.sessionId));
  }
}

export function mount(container: HTMLElement, api = new ApiClient("")): App {
  const app = new App(api);
  container.appendChild(app.root);
  void app.start();
  return app;
}

declare global {
  interface Window {
    __linkqBootstrapped?: boolean;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  if (!window.__linkqBootstrapped) {
    window.__linkqBootstrapped = true;
    mount(document.getElementById("app")!);
  }
}
