/** Wire types for the navigation service HTTP API. */

export interface BBox {
  page: number;
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface TableRef {
  table_id: string;
  row: number;
  col: number;
  rowspan: number;
  colspan: number;
}

export interface AnchorInfo {
  anchor_id: string;
  type: "para" | "heading" | "table_cell";
  page: number;
  bboxes: BBox[];
  char_range: { start: number; end: number };
  ordinal: number | null;
  section_path: string[];
  text: string;
  table?: TableRef;
}

export interface IntentInfo {
  kind: "temporal" | "contextual" | "summarization" | "viewer_control";
  slots: Record<string, unknown>;
  confidence: number;
  source: "grammar" | "backoff";
  rewrites: string[];
}

export interface CandidateInfo {
  anchor_id: string;
  fused: number;
  lexical_norm: number;
  dense_norm: number;
  page: number;
  ordinal: number | null;
  snippet: { start: number; end: number } | null;
  preview: string;
}

export interface SynopsisInfo {
  scope: string;
  built_at: string;
  lines: { text: string; anchor_ids: string[] }[];
}

export type NavAction =
  | { type: "scroll_to_anchor"; anchor_id: string; highlight_ids: string[];
      candidates?: CandidateInfo[] }
  | { type: "show_disambiguation"; highlight_ids: string[];
      candidates: CandidateInfo[] }
  | { type: "show_synopsis"; synopsis: SynopsisInfo }
  | { type: "await_confirm"; transcript: string; intent: IntentInfo }
  | { type: "abstain"; reason: string }
  | { type: "ack"; op: string };

export interface NavResponse {
  session_id: string;
  transcript_echo: string;
  intent: IntentInfo;
  action: NavAction;
  flags: string[];
  latency_ms: { route: number; retrieve: number; total: number };
  rewrites?: string[];
}

export interface UploadResult {
  doc_id: string;
  anchor_count: number;
  page_count: number;
}
