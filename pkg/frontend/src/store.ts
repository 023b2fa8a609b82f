/**
 * View state for one explorer tab. Every rendered value is sourced from
 * the latest server response; nothing is recomputed client-side and no
 * update is applied optimistically.
 */

import type { ActionsBody, FloorplanRect, SessionState, TransformRequest } from "./types";
import { History } from "./history";

export interface MemoryTile {
  mem_id: string;
  partition: string;
  words: number;
  word_bits: number;
  onCriticalPath: boolean;
}

export class ViewState {
  sessionId: string | null = null;
  state: SessionState | null = null;
  actions: ActionsBody | null = null;
  rects: FloorplanRect[] = [];
  pendingAction: TransformRequest | null = null;
  readonly history = new History();

  applySession(state: SessionState, label: string): void {
    this.sessionId = state.session_id;
    this.state = state;
    this.history.push(state.fmax_mhz, state.ppa.total_area_mm2, state.ppa.total_w, label);
  }

  /** Server-confirmed undo: replace state and truncate the history. */
  applyUndo(state: SessionState): void {
    this.state = state;
    this.history.truncate();
  }

  applyActions(actions: ActionsBody): void {
    this.actions = actions;
  }

  applyFloorplan(rects: FloorplanRect[]): void {
    this.rects = rects;
  }

  tiles(): MemoryTile[] {
    if (!this.actions) return [];
    return this.actions.memories.map((m) => ({
      mem_id: m.mem_id,
      partition: m.partition,
      words: m.words,
      word_bits: m.word_bits,
      onCriticalPath: m.on_critical_path,
    }));
  }

  criticalMemoryIds(): Set<string> {
    return new Set(this.state?.critical_path.memory_ids ?? []);
  }
}

/** Partition fill colors follow the layout plots: CUs green, controller
 * yellow/pink, top blue. */
export function partitionColor(partition: string, highlighted: boolean): string {
  if (partition.startsWith("cu")) return highlighted ? "#1a7a2e" : "#79c98b";
  if (partition === "mem_controller") return highlighted ? "#c98ab0" : "#e8d06a";
  return "#7aa7d9";
}
