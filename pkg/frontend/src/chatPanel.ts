import { provenanceBackgrounds } from "./theme.js";
import type { ChatMessage } from "./types.js";

export interface ChatPanelHandlers {
  onSend: (text: string) => void;
  onCopyToEditor: (query: string) => void;
  onCopyAndRun: (query: string) => void;
}

const QUICK_PROMPTS = [
  "That is not the entity I meant; please search again with a more specific name.",
  "The query uses the wrong property; please search the entity's properties again.",
  "Please refine the query to answer exactly my original question.",
];

/** Conversation view: visible messages, an internal-traffic toggle, quick
 * corrective prompts, and the two-action card for each generated query. */
export class ChatPanel {
  readonly root: HTMLElement;
  private readonly messageList: HTMLElement;
  private readonly input: HTMLTextAreaElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly internalToggle: HTMLInputElement;
  private messages: ChatMessage[] = [];
  private queryCards: HTMLElement[] = [];

  constructor(private readonly handlers: ChatPanelHandlers) {
    this.root = document.createElement("section");
    this.root.className = "panel chat-panel";
    this.root.innerHTML = `
      <header>
        <h2>Chat</h2>
        <label class="internal-toggle-label">
          <input type="checkbox" class="internal-toggle" />
          show system traffic
        </label>
      </header>
      <div class="chat-messages"></div>
      <div class="quick-prompts"></div>
      <div class="chat-compose">
        <textarea class="chat-input" rows="2"
          placeholder="Ask a question about Wikidata..."></textarea>
        <button class="chat-send">Send</button>
      </div>`;
    this.messageList = this.root.querySelector(".chat-messages")!;
    this.input = this.root.querySelector(".chat-input")!;
    this.sendButton = this.root.querySelector(".chat-send")!;
    this.internalToggle = this.root.querySelector(".internal-toggle")!;

    this.internalToggle.addEventListener("change", () => this.renderMessages());
    this.sendButton.addEventListener("click", () => this.submit());
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        this.submit();
      }
    });

    const quickPrompts = this.root.querySelector(".quick-prompts")!;
    for (const prompt of QUICK_PROMPTS) {
      const button = document.createElement("button");
      button.className = "quick-prompt";
      button.textContent = prompt;
      // Inserted into the input for editing, never auto-sent.
      button.addEventListener("click", () => {
        this.input.value = prompt;
        this.input.focus();
      });
      quickPrompts.appendChild(button);
    }
  }

  private submit(): void {
    const text = this.input.value.trim();
    if (!text || this.sendButton.disabled) return;
    this.input.value = "";
    this.handlers.onSend(text);
  }

  setBusy(busy: boolean): void {
    this.sendButton.disabled = busy;
    this.sendButton.textContent = busy ? "Working..." : "Send";
  }

  addMessages(messages: ChatMessage[]): void {
    this.messages.push(...messages);
    this.renderMessages();
  }

  addError(message: string): void {
    const bubble = document.createElement("div");
    bubble.className = "chat-bubble chat-error";
    bubble.textContent = message;
    this.messageList.appendChild(bubble);
  }

  /** The generated-query card: exactly two actions, so a pending edit in the
   * editor can never be overwritten by accident. */
  showGeneratedQuery(query: string): void {
    const card = document.createElement("div");
    card.className = "query-card";
    const pre = document.createElement("pre");
    pre.className = "query-card-text";
    pre.textContent = query;
    card.appendChild(pre);

    const actions = document.createElement("div");
    actions.className = "query-card-actions";
    const copyButton = document.createElement("button");
    copyButton.className = "query-action query-copy";
    copyButton.textContent = "Copy to editor";
    copyButton.addEventListener("click", () => this.handlers.onCopyToEditor(query));
    const runButton = document.createElement("button");
    runButton.className = "query-action query-copy-run";
    runButton.textContent = "Copy and run";
    runButton.addEventListener("click", () => this.handlers.onCopyAndRun(query));
    actions.append(copyButton, runButton);
    card.appendChild(actions);

    this.queryCards.push(card);
    this.messageList.appendChild(card);
  }

  private renderMessages(): void {
    const showInternal = this.internalToggle.checked;
    this.messageList.querySelectorAll(".chat-bubble").forEach((n) => n.remove());
    const visible = this.messages.filter(
      (m) => showInternal || m.visibility === "shown",
    );
    const cards = this.queryCards;
    for (const card of cards) card.remove();
    for (const message of visible) {
      const bubble = document.createElement("div");
      bubble.className = `chat-bubble chat-${message.role} provenance-${message.provenance}`;
      if (message.visibility === "internalProtocol") {
        bubble.classList.add("chat-internal");
      }
      bubble.style.background =
        provenanceBackgrounds[message.provenance] ?? provenanceBackgrounds.system;
      bubble.textContent = message.content;
      this.messageList.appendChild(bubble);
    }
    for (const card of cards) this.messageList.appendChild(card);
  }
}
