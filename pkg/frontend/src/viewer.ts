/** The viewer shell: command bar, confirm strip, evidence panel, breadcrumbs.
 *
 * One in-flight command at a time, matching the service's per-session FIFO;
 * the send control re-enables when the response lands. A failed request
 * shows the offline banner and preserves the typed input. Every action a
 * shortcut performs is just a transcript, so keyboard and voice stay at
 * parity with typing.
 */

import { ApiError, NavApi } from "./api.js";
import { DocumentView } from "./render.js";
import { GroundingError, applyNavResponse, initialState, ViewerState } from "./state.js";
import { attachMicrophone } from "./speech.js";
import type { NavResponse } from "./types.js";

export interface ViewerOptions {
  api: NavApi;
  docId: string;
  sessionId?: string;
  keymap?: Record<string, string>;
}

export class Viewer {
  state!: ViewerState;
  view!: DocumentView;
  private busy = false;

  private readonly doc: HTMLElement;
  private readonly input: HTMLInputElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly micButton: HTMLButtonElement;
  private readonly confirmStrip: HTMLElement;
  private readonly echoEl: HTMLElement;
  private readonly confirmButton: HTMLButtonElement;
  private readonly cancelButton: HTMLButtonElement;
  private readonly noticeEl: HTMLElement;
  private readonly offlineEl: HTMLElement;
  private readonly evidenceEl: HTMLElement;
  private readonly chipsEl: HTMLElement;
  private readonly breadcrumbEl: HTMLElement;
  private readonly synopsisEl: HTMLElement;

  constructor(readonly root: HTMLElement, readonly options: ViewerOptions) {
    root.innerHTML = `
      <div class="topbar">
        <form class="command-bar">
          <input type="text" class="command-input"
                 placeholder="Type a command: go to paragraph 23" />
          <button type="submit" class="send">Go</button>
          <button type="button" class="mic" hidden>Mic</button>
        </form>
        <div class="confirm-strip" hidden>
          <span class="echo"></span>
          <button type="button" class="confirm">Confirm</button>
          <button type="button" class="cancel">Cancel</button>
        </div>
        <div class="notice" hidden></div>
        <div class="offline-banner" hidden>Service unreachable; input kept.</div>
        <nav class="breadcrumbs"></nav>
      </div>
      <div class="layout">
        <main class="document" tabindex="0"></main>
        <aside class="sidebar">
          <div class="chips" hidden></div>
          <div class="synopsis" hidden></div>
          <ol class="evidence"></ol>
        </aside>
      </div>`;

    this.doc = this.q(".document");
    this.input = this.q<HTMLInputElement>(".command-input");
    this.sendButton = this.q<HTMLButtonElement>(".send");
    this.micButton = this.q<HTMLButtonElement>(".mic");
    this.confirmStrip = this.q(".confirm-strip");
    this.echoEl = this.q(".echo");
    this.confirmButton = this.q<HTMLButtonElement>(".confirm");
    this.cancelButton = this.q<HTMLButtonElement>(".cancel");
    this.noticeEl = this.q(".notice");
    this.offlineEl = this.q(".offline-banner");
    this.evidenceEl = this.q(".evidence");
    this.chipsEl = this.q(".chips");
    this.breadcrumbEl = this.q(".breadcrumbs");
    this.synopsisEl = this.q(".synopsis");

    this.q<HTMLFormElement>(".command-bar").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitInput();
    });
    this.confirmButton.addEventListener("click", () => void this.confirmPending());
    this.cancelButton.addEventListener("click", () => this.cancelPending());
    attachMicrophone(this.micButton, (transcript) => {
      this.input.value = transcript;
      void this.submitInput();
    });
    root.addEventListener("keydown", (event) => this.handleKey(event));
  }

  private q<T extends HTMLElement = HTMLElement>(selector: string): T {
    const el = this.root.querySelector<T>(selector);
    if (!el) throw new Error(`missing viewer element ${selector}`);
    return el;
  }

  async start(): Promise<void> {
    const anchors = await this.options.api.fetchAnchors(this.options.docId);
    this.state = initialState(this.options.docId, anchors);
    this.view = new DocumentView(this.doc, anchors);
    this.renderPanels();
  }

  /** Send a transcript; shortcuts and chips route through here too. */
  async sendCommand(transcript: string, confirm = false): Promise<NavResponse | null> {
    if (this.busy) return null;
    this.busy = true;
    this.sendButton.disabled = true;
    try {
      const resp = await this.options.api.sendCommand(this.options.docId,
        transcript, { confirm, sessionId: this.options.sessionId });
      this.offlineEl.hidden = true;
      const effects = applyNavResponse(this.state, resp);
      if (effects.scrollTo) this.view.scrollToAnchor(effects.scrollTo);
      this.view.applyHighlights(this.state);
      this.renderPanels();
      return resp;
    } catch (error) {
      if (error instanceof GroundingError) throw error;  // must never occur
      if (error instanceof ApiError && error.status < 500) {
        this.state.notice = error.message;
        this.renderPanels();
        return null;
      }
      this.offlineEl.hidden = false;  // input stays as typed
      return null;
    } finally {
      this.busy = false;
      this.sendButton.disabled = false;
    }
  }

  private async submitInput(): Promise<void> {
    const transcript = this.input.value.trim();
    if (!transcript) return;
    const resp = await this.sendCommand(transcript);
    if (resp && resp.action.type !== "await_confirm") {
      this.input.value = "";
    }
  }

  private async confirmPending(): Promise<void> {
    const pending = this.state.pending;
    if (!pending) return;
    await this.sendCommand(pending.transcript, true);
    this.input.value = "";
  }

  private cancelPending(): void {
    this.state.pending = null;
    this.renderPanels();
  }

  /** Keyboard parity: shortcuts send the same transcripts a voice user says. */
  handleKey(event: KeyboardEvent): void {
    if (event.target === this.input) return;
    const keymap = this.options.keymap ?? {};
    const transcript = keymap[event.key];
    if (transcript) {
      event.preventDefault();
      void this.sendCommand(transcript);
      return;
    }
    if (/^[1-9]$/.test(event.key) && this.state.chipsVisible) {
      event.preventDefault();
      void this.sendCommand(`open ${event.key}`);
    }
  }

  private renderPanels(): void {
    // Confirm strip: echoes the transcript and the parsed intent.
    const pending = this.state.pending;
    this.confirmStrip.hidden = pending === null;
    this.echoEl.textContent = pending
      ? `${pending.transcript} -> ${pending.intent.kind} ${JSON.stringify(pending.intent.slots)}`
      : "";

    this.noticeEl.hidden = this.state.notice === null;
    this.noticeEl.textContent = this.state.notice ?? "";

    // Breadcrumb trail of recent anchors.
    this.breadcrumbEl.textContent = "";
    for (const anchorId of this.state.breadcrumb.slice(-8)) {
      const anchor = this.state.anchors.get(anchorId);
      const crumb = document.createElement("button");
      crumb.type = "button";
      crumb.className = "crumb";
      crumb.textContent = anchor?.ordinal != null
        ? `para ${anchor.ordinal}` : `p.${anchor?.page ?? "?"}`;
      crumb.addEventListener("click", () => void this.sendCommand("back"));
      this.breadcrumbEl.appendChild(crumb);
    }

    // Disambiguation chips (transient) and the evidence panel (persistent).
    this.chipsEl.hidden = !this.state.chipsVisible;
    this.chipsEl.textContent = "";
    if (this.state.chipsVisible) {
      this.state.evidence.forEach((candidate, index) => {
        const chip = document.createElement("button");
        chip.type = "button";
        chip.className = "chip";
        chip.dataset.index = String(index + 1);
        chip.textContent = `${index + 1} · p.${candidate.page}` +
          (candidate.ordinal != null ? ` ¶${candidate.ordinal}` : "");
        chip.title = candidate.preview;
        chip.addEventListener("click", () => void this.sendCommand(`open ${index + 1}`));
        this.chipsEl.appendChild(chip);
      });
    }

    this.evidenceEl.textContent = "";
    this.state.evidence.forEach((candidate, index) => {
      const item = document.createElement("li");
      item.className = "evidence-item";
      const badge = document.createElement("button");
      badge.type = "button";
      badge.className = "badge";
      badge.textContent = candidate.ordinal != null
        ? `¶${candidate.ordinal}` : `p.${candidate.page}`;
      badge.addEventListener("click", () => void this.sendCommand(`open ${index + 1}`));
      const preview = document.createElement("span");
      preview.className = "preview";
      preview.textContent = candidate.preview;
      item.append(badge, preview);
      this.evidenceEl.appendChild(item);
    });

    const synopsis = this.state.synopsis;
    this.synopsisEl.hidden = synopsis === null;
    this.synopsisEl.textContent = "";
    if (synopsis) {
      const heading = document.createElement("h3");
      heading.textContent = `Synopsis: ${synopsis.scope}`;
      this.synopsisEl.appendChild(heading);
      for (const line of synopsis.lines) {
        const p = document.createElement("p");
        p.className = "synopsis-line";
        p.textContent = line.text;
        const cite = document.createElement("button");
        cite.type = "button";
        cite.className = "cite";
        cite.dataset.anchorId = line.anchor_ids[0];
        const anchor = this.state.anchors.get(line.anchor_ids[0]);
        cite.textContent = anchor?.ordinal != null ? `¶${anchor.ordinal}` : "go";
        cite.addEventListener("click", () => {
          if (anchor?.ordinal != null) {
            void this.sendCommand(`go to paragraph ${anchor.ordinal}`);
          }
        });
        p.appendChild(cite);
        this.synopsisEl.appendChild(p);
      }
    }
  }
}

export async function createViewer(root: HTMLElement,
                                   options: ViewerOptions): Promise<Viewer> {
  const viewer = new Viewer(root, options);
  await viewer.start();
  return viewer;
}
