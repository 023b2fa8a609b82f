/**
 * What-if panel logic: which transforms are offered, the preview of the
 * recommended action, and the apply/undo round-trips. Availability comes
 * only from the server's legality report; a control is disabled exactly
 * when the server says the transform is illegal.
 */

import { ApiError, SessionClient } from "./client";
import type { MemoryAction, NetAction, RecommendationBody, TransformRequest } from "./types";
import type { ViewState } from "./store";

export interface SplitControls {
  memId: string;
  wordsEnabled: boolean;
  wordsReason: string;
  bitsEnabled: boolean;
  bitsReason: string;
}

export function splitControls(mem: MemoryAction): SplitControls {
  return {
    memId: mem.mem_id,
    wordsEnabled: mem.can_split_words,
    wordsReason: mem.split_words_reason,
    bitsEnabled: mem.can_split_bits,
    bitsReason: mem.split_bits_reason,
  };
}

export function pipelineEnabled(net: NetAction): boolean {
  return net.can_pipeline;
}

export interface Preview {
  action: TransformRequest | null;
  currentFmax: number;
  predictedFmax: number;
  bottleneck: string | null;
  reason: string;
}

export function previewFromRecommendation(rec: RecommendationBody): Preview {
  const action: TransformRequest | null = rec.action_kind
    ? {
        kind: rec.action_kind as TransformRequest["kind"],
        target: rec.action_target as string,
        fan: rec.action_fan,
      }
    : null;
  return {
    action,
    currentFmax: rec.current_fmax_mhz,
    predictedFmax: rec.predicted_fmax_mhz,
    bottleneck: rec.bottleneck,
    reason: rec.reason,
  };
}

export interface ApplyOutcome {
  ok: boolean;
  message: string;
}

/** Commit an action; on a legality conflict the state is left untouched
 * and the server's message is surfaced inline. */
export async function applyAction(
  client: SessionClient,
  view: ViewState,
  action: TransformRequest,
): Promise<ApplyOutcome> {
  if (!view.sessionId) return { ok: false, message: "no active session" };
  try {
    const state = await client.applyTransform(view.sessionId, action);
    view.applySession(state, `${action.kind} ${action.target}`);
    view.applyActions(await client.getActions(view.sessionId));
    return { ok: true, message: "" };
  } catch (e) {
    if (e instanceof ApiError) return { ok: false, message: e.message };
    throw e;
  }
}

export async function undoLast(client: SessionClient, view: ViewState): Promise<ApplyOutcome> {
  if (!view.sessionId) return { ok: false, message: "no active session" };
  try {
    const state = await client.undo(view.sessionId);
    view.applyUndo(state);
    view.applyActions(await client.getActions(view.sessionId));
    return { ok: true, message: "" };
  } catch (e) {
    if (e instanceof ApiError) return { ok: false, message: e.message };
    throw e;
  }
}
