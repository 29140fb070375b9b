/** Viewer state and the NavResponse reducer.
 *
 * The reducer is exhaustive over action types: an unrecognized action or an
 * anchor id that is not in the document is a hard error, never a silent
 * render. That is what keeps the display evidence-only.
 */

import type { AnchorInfo, CandidateInfo, IntentInfo, NavAction, NavResponse,
              SynopsisInfo } from "./types.js";

export interface ViewerState {
  docId: string;
  anchors: Map<string, AnchorInfo>;
  currentAnchorId: string | null;
  highlightIds: Set<string>;
  highlightsVisible: boolean;
  evidence: CandidateInfo[];
  breadcrumb: string[];
  pending: { transcript: string; intent: IntentInfo } | null;
  synopsis: SynopsisInfo | null;
  notice: string | null;
  chipsVisible: boolean;
}

export interface NavEffects {
  scrollTo: string | null;
}

export function initialState(docId: string, anchors: AnchorInfo[]): ViewerState {
  return {
    docId,
    anchors: new Map(anchors.map((a) => [a.anchor_id, a])),
    currentAnchorId: null,
    highlightIds: new Set(),
    highlightsVisible: true,
    evidence: [],
    breadcrumb: [],
    pending: null,
    synopsis: null,
    notice: null,
    chipsVisible: false,
  };
}

export class GroundingError extends Error {}

function assertKnown(state: ViewerState, ids: Iterable<string>): void {
  for (const id of ids) {
    if (!state.anchors.has(id)) {
      throw new GroundingError(`response references unknown anchor ${id}`);
    }
  }
}

/** Fold a NavResponse into the state; returns the scroll effect to perform. */
export function applyNavResponse(state: ViewerState, resp: NavResponse): NavEffects {
  const effects: NavEffects = { scrollTo: null };
  // Any action settles the previous confirmation; chips collapse after action.
  state.pending = null;
  state.notice = null;
  const action: NavAction = resp.action;
  switch (action.type) {
    case "scroll_to_anchor": {
      assertKnown(state, [action.anchor_id, ...action.highlight_ids]);
      if (state.currentAnchorId && state.currentAnchorId !== action.anchor_id) {
        state.breadcrumb.push(state.currentAnchorId);
      }
      state.currentAnchorId = action.anchor_id;
      state.highlightIds = new Set(action.highlight_ids);
      state.highlightIds.add(action.anchor_id);
      if (action.candidates) {
        assertKnown(state, action.candidates.map((c) => c.anchor_id));
        state.evidence = action.candidates;
      }
      state.chipsVisible = false;
      effects.scrollTo = action.anchor_id;
      break;
    }
    case "show_disambiguation": {
      assertKnown(state, action.candidates.map((c) => c.anchor_id));
      state.evidence = action.candidates;
      state.chipsVisible = true;
      break;
    }
    case "show_synopsis": {
      for (const line of action.synopsis.lines) {
        assertKnown(state, line.anchor_ids);
      }
      state.synopsis = action.synopsis;
      state.chipsVisible = false;
      break;
    }
    case "await_confirm": {
      state.pending = { transcript: action.transcript, intent: action.intent };
      break;
    }
    case "abstain": {
      state.notice = action.reason;
      state.chipsVisible = false;
      break;
    }
    case "ack": {
      if (action.op === "toggle_highlights") {
        state.highlightsVisible = !state.highlightsVisible;
      }
      state.chipsVisible = false;
      break;
    }
    default: {
      const never: never = action;
      throw new GroundingError(`unknown action ${(never as { type: string }).type}`);
    }
  }
  return effects;
}
