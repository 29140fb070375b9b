/** Browser bootstrap: ?doc=<doc_id>&base=<service url>. */

import { NavApi } from "./api.js";
import { createViewer } from "./viewer.js";

async function loadKeymap(): Promise<Record<string, string>> {
  try {
    const resp = await fetch("./keymap.json");
    return resp.ok ? ((await resp.json()) as Record<string, string>) : {};
  } catch {
    return {};
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("base") ?? "http://127.0.0.1:8040";
  const docId = params.get("doc");
  const root = document.getElementById("viewer");
  if (!root) throw new Error("missing #viewer element");
  if (!docId) {
    root.textContent = "Pass ?doc=<doc_id> (and optionally &base=<service url>).";
    return;
  }
  const keymap = await loadKeymap();
  const api = new NavApi(base);
  const sessionId = `ui-${Math.random().toString(36).slice(2, 10)}`;
  try {
    await createViewer(root, { api, docId, sessionId, keymap });
  } catch (error) {
    const banner = document.createElement("div");
    banner.className = "offline-banner";
    banner.textContent = `Could not load document: ${String(error)}. Retry?`;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void boot());
    banner.appendChild(retry);
    root.textContent = "";
    root.appendChild(banner);
  }
}

void boot();
