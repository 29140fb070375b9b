/** Thin HTTP client for the navigation service; fetch is injectable for tests. */

import type { AnchorInfo, NavResponse, UploadResult } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class NavApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      throw new ApiError(`${init?.method ?? "GET"} ${path} -> ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  uploadDocument(payload: unknown): Promise<UploadResult> {
    return this.request("/documents", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  fetchAnchors(docId: string): Promise<AnchorInfo[]> {
    return this.request(`/documents/${encodeURIComponent(docId)}/anchors`);
  }

  sendCommand(
    docId: string,
    transcript: string,
    options: { confirm?: boolean; sessionId?: string } = {},
  ): Promise<NavResponse> {
    return this.request(`/sessions/${encodeURIComponent(docId)}/command`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        transcript,
        confirm: options.confirm ?? false,
        session_id: options.sessionId ?? null,
      }),
    });
  }
}
