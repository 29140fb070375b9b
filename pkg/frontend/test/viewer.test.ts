// Automated browser-environment tests (jsdom, typed input only; no microphone).

import { beforeEach, describe, expect, it } from "vitest";

import { NavApi } from "../src/api.js";
import { GroundingError } from "../src/state.js";
import { Viewer, createViewer } from "../src/viewer.js";
import { FakeNavService } from "./fakeService.js";

const KEYMAP = { n: "next hit", p: "previous hit", h: "toggle highlights", b: "back" };

let service: FakeNavService;
let viewer: Viewer;
let root: HTMLElement;

async function mount(): Promise<void> {
  service = new FakeNavService();
  root = document.createElement("div");
  document.body.appendChild(root);
  const api = new NavApi("http://fake.test", service.fetchLike());
  viewer = await createViewer(root, { api, docId: "doc1", sessionId: "t", keymap: KEYMAP });
}

function input(): HTMLInputElement {
  return root.querySelector(".command-input") as HTMLInputElement;
}

function type(text: string): void {
  input().value = text;
}

async function submit(): Promise<void> {
  (root.querySelector(".command-bar") as HTMLFormElement).dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }));
  await flush();
}

async function flush(): Promise<void> {
  // Let pending promise chains settle.
  for (let i = 0; i < 6; i++) await Promise.resolve();
  await new Promise((resolve) => setTimeout(resolve, 0));
}

function anchorEl(anchorId: string): HTMLElement {
  return root.querySelector(`.anchor[data-anchor-id="${anchorId}"]`) as HTMLElement;
}

beforeEach(async () => {
  document.body.innerHTML = "";
  await mount();
});

describe("document rendering", () => {
  it("renders one positioned box per anchor bbox", () => {
    const boxes = root.querySelectorAll(".anchor");
    expect(boxes.length).toBe(service.anchors.length);
    const first = boxes[1] as HTMLElement;
    expect(first.style.left).toBe("8%");
    expect(first.style.width).toBe("84.00000000000001%");
    expect(root.querySelectorAll(".page").length).toBe(3);
  });

  it("renders table cells and headings with their own classes", () => {
    expect(root.querySelector(".anchor-heading")).not.toBeNull();
  });
});

describe("go to paragraph 23 with confirm", () => {
  it("echoes the parse, then scrolls and highlights the right box", async () => {
    type("go to paragraph 23");
    await submit();

    const strip = root.querySelector(".confirm-strip") as HTMLElement;
    expect(strip.hidden).toBe(false);
    expect(strip.querySelector(".echo")!.textContent).toContain("paragraph");
    expect(viewer.state.pending?.transcript).toBe("go to paragraph 23");
    // Nothing moved yet.
    expect(viewer.state.currentAnchorId).toBeNull();

    (strip.querySelector(".confirm") as HTMLButtonElement).click();
    await flush();

    const target = service.anchors.find((a) => a.ordinal === 23)!;
    expect(viewer.state.currentAnchorId).toBe(target.anchor_id);
    expect(viewer.state.highlightIds.has(target.anchor_id)).toBe(true);
    const el = anchorEl(target.anchor_id);
    expect(el.classList.contains("highlight-target")).toBe(true);
    expect((root.querySelector(".document") as HTMLElement).dataset.scrolledTo)
      .toBe(target.anchor_id);
    // The confirm strip collapsed after the action.
    expect((root.querySelector(".confirm-strip") as HTMLElement).hidden).toBe(true);
  });

  it("cancel clears the pending jump without navigating", async () => {
    type("go to paragraph 23");
    await submit();
    (root.querySelector(".cancel") as HTMLButtonElement).click();
    await flush();
    expect(viewer.state.pending).toBeNull();
    expect(viewer.state.currentAnchorId).toBeNull();
    expect(service.commandLog.length).toBe(1);  // no confirm round-trip
  });
});

describe("disambiguation chips", () => {
  it("renders selectable chips and 'open 2' selects candidate 2", async () => {
    type("find the ambiguous point");
    await submit();

    const chips = root.querySelectorAll(".chip");
    expect(chips.length).toBe(4);
    expect(viewer.state.chipsVisible).toBe(true);

    type("open 2");
    await submit();

    const expected = viewer.state.evidence[1].anchor_id;
    expect(viewer.state.currentAnchorId).toBe(expected);
    expect(anchorEl(expected).classList.contains("highlight-target")).toBe(true);
    // Chips auto-collapse after the action.
    expect(viewer.state.chipsVisible).toBe(false);
    expect((root.querySelector(".chips") as HTMLElement).hidden).toBe(true);
  });

  it("clicking a chip routes through the service as open N", async () => {
    type("find the ambiguous point");
    await submit();
    (root.querySelectorAll(".chip")[2] as HTMLButtonElement).click();
    await flush();
    expect(service.commandLog.at(-1)).toEqual({ transcript: "open 3", confirm: false });
    expect(viewer.state.currentAnchorId).toBe(viewer.state.evidence[2].anchor_id);
  });

  it("digit keys select chips while the strip is visible", async () => {
    type("find the ambiguous point");
    await submit();
    root.dispatchEvent(new KeyboardEvent("keydown", { key: "2", bubbles: true }));
    await flush();
    expect(service.commandLog.at(-1)).toEqual({ transcript: "open 2", confirm: false });
  });
});

describe("keyboard parity", () => {
  it("the next-hit shortcut sends the same transcript as the utterance", async () => {
    type("some contextual query");
    await submit();
    root.dispatchEvent(new KeyboardEvent("keydown", { key: "n", bubbles: true }));
    await flush();
    expect(service.commandLog.at(-1)).toEqual({ transcript: "next hit", confirm: false });
  });

  it("toggle highlights flips overlay visibility without reflow", async () => {
    type("some contextual query");
    await submit();
    const pageCountBefore = root.querySelectorAll(".page").length;
    const target = viewer.state.currentAnchorId!;
    expect(anchorEl(target).classList.contains("highlight-target")).toBe(true);

    root.dispatchEvent(new KeyboardEvent("keydown", { key: "h", bubbles: true }));
    await flush();
    expect(anchorEl(target).classList.contains("highlight-target")).toBe(false);
    // Spatial stability: same pages, same boxes, only classes changed.
    expect(root.querySelectorAll(".page").length).toBe(pageCountBefore);
    expect(root.querySelectorAll(".anchor").length).toBe(service.anchors.length);

    root.dispatchEvent(new KeyboardEvent("keydown", { key: "h", bubbles: true }));
    await flush();
    expect(anchorEl(target).classList.contains("highlight-target")).toBe(true);
  });

  it("back returns to the previous anchor", async () => {
    type("go to paragraph 4");
    await submit();
    (root.querySelector(".confirm") as HTMLButtonElement).click();
    await flush();
    type("go to paragraph 9");
    await submit();
    (root.querySelector(".confirm") as HTMLButtonElement).click();
    await flush();

    root.dispatchEvent(new KeyboardEvent("keydown", { key: "b", bubbles: true }));
    await flush();
    const para4 = service.anchors.find((a) => a.ordinal === 4)!;
    expect(viewer.state.currentAnchorId).toBe(para4.anchor_id);
  });
});

describe("evidence panel", () => {
  it("answer responses fill the panel with badged snippets", async () => {
    type("some contextual query");
    await submit();
    const items = root.querySelectorAll(".evidence-item");
    expect(items.length).toBe(2);
  });
});

describe("abstain and synopsis", () => {
  it("abstain shows a non-modal notice and no navigation", async () => {
    type("nothing matches this");
    await submit();
    expect(viewer.state.currentAnchorId).toBeNull();
    const notice = root.querySelector(".notice") as HTMLElement;
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("no evidence");
  });

  it("synopsis lines render with anchor citations", async () => {
    type("summarize the charges");
    await submit();
    const lines = root.querySelectorAll(".synopsis-line");
    expect(lines.length).toBe(2);
    expect(root.querySelectorAll(".cite").length).toBe(2);
  });
});

describe("failure handling", () => {
  it("service unreachable shows the offline banner and preserves input", async () => {
    service.failNext = true;
    type("go to paragraph 3");
    await submit();
    expect((root.querySelector(".offline-banner") as HTMLElement).hidden).toBe(false);
    expect(input().value).toBe("go to paragraph 3");
  });

  it("an ungrounded anchor id is a hard error", async () => {
    type("ghost reference");
    let thrown: unknown = null;
    try {
      await viewer.sendCommand("ghost reference");
    } catch (error) {
      thrown = error;
    }
    expect(thrown).toBeInstanceOf(GroundingError);
  });
});
