/** Document rendering: positioned anchor boxes on fixed page surfaces.
 *
 * The layout is built once from anchor geometry; navigation afterwards only
 * changes scroll position and highlight classes, never the layout itself.
 * Pages mount their anchor boxes lazily via IntersectionObserver where the
 * platform provides it, so 350-page documents stay responsive; scroll
 * targets force-mount their page first.
 */

import type { AnchorInfo } from "./types.js";
import type { ViewerState } from "./state.js";

const EAGER_PAGES = 8;

export class DocumentView {
  private readonly byPage = new Map<number, AnchorInfo[]>();
  private readonly pageOf = new Map<string, number>();
  private readonly pageEls = new Map<number, HTMLElement>();
  private observer: IntersectionObserver | null = null;

  constructor(readonly container: HTMLElement, anchors: AnchorInfo[]) {
    container.textContent = "";
    container.classList.add("pages");
    let pageCount = 0;
    for (const anchor of anchors) {
      this.pageOf.set(anchor.anchor_id, anchor.bboxes[0]?.page ?? 1);
      for (const box of anchor.bboxes) {
        pageCount = Math.max(pageCount, box.page);
        const list = this.byPage.get(box.page) ?? [];
        list.push(anchor);
        this.byPage.set(box.page, list);
      }
    }
    if (typeof IntersectionObserver === "function") {
      this.observer = new IntersectionObserver((entries) => {
        for (const entry of entries) {
          if (entry.isIntersecting) {
            const pageEl = entry.target as HTMLElement;
            this.mountPage(Number(pageEl.dataset.page));
            this.observer?.unobserve(pageEl);
          }
        }
      }, { rootMargin: "200% 0%" });
    }
    for (let page = 1; page <= pageCount; page++) {
      const pageEl = document.createElement("section");
      pageEl.className = "page";
      pageEl.dataset.page = String(page);
      const label = document.createElement("span");
      label.className = "page-number";
      label.textContent = String(page);
      pageEl.appendChild(label);
      container.appendChild(pageEl);
      this.pageEls.set(page, pageEl);
      if (this.observer && page > EAGER_PAGES) {
        this.observer.observe(pageEl);
      } else {
        this.mountPage(page);
      }
    }
  }

  private mountPage(page: number): void {
    const pageEl = this.pageEls.get(page);
    if (!pageEl || pageEl.dataset.mounted === "true") return;
    pageEl.dataset.mounted = "true";
    for (const anchor of this.byPage.get(page) ?? []) {
      for (const box of anchor.bboxes) {
        if (box.page !== page) continue;
        const el = document.createElement("div");
        el.className = `anchor anchor-${anchor.type}`;
        el.dataset.anchorId = anchor.anchor_id;
        el.style.left = `${box.x0 * 100}%`;
        el.style.top = `${box.y0 * 100}%`;
        el.style.width = `${(box.x1 - box.x0) * 100}%`;
        el.style.height = `${(box.y1 - box.y0) * 100}%`;
        el.textContent = anchor.text;
        if (anchor.ordinal !== null) el.dataset.ordinal = String(anchor.ordinal);
        pageEl.appendChild(el);
      }
    }
  }

  /** Anchor element, mounting its page when it was lazily deferred. */
  anchorElement(anchorId: string): HTMLElement | null {
    const page = this.pageOf.get(anchorId);
    if (page !== undefined) this.mountPage(page);
    return this.container.querySelector<HTMLElement>(
      `.anchor[data-anchor-id="${cssEscape(anchorId)}"]`);
  }

  /** Re-apply highlight classes; target and alternates stay distinct. */
  applyHighlights(state: ViewerState): void {
    for (const el of Array.from(
        this.container.querySelectorAll<HTMLElement>(".anchor"))) {
      const id = el.dataset.anchorId ?? "";
      el.classList.toggle("current", id === state.currentAnchorId);
      const highlighted = state.highlightsVisible && state.highlightIds.has(id);
      el.classList.toggle("highlight-target",
        highlighted && id === state.currentAnchorId);
      el.classList.toggle("highlight-alt",
        highlighted && id !== state.currentAnchorId);
    }
  }

  /** Smooth-scroll the viewport to an anchor box; never a layout change. */
  scrollToAnchor(anchorId: string): void {
    const el = this.anchorElement(anchorId);
    if (!el) return;
    if (typeof el.scrollIntoView === "function") {
      el.scrollIntoView({ behavior: "smooth", block: "center" });
    }
    this.container.dataset.scrolledTo = anchorId;
  }
}

function cssEscape(value: string): string {
  if (typeof CSS !== "undefined" && typeof CSS.escape === "function") {
    return CSS.escape(value);
  }
  return value.replace(/["\\\]]/g, "\\$&");
}
