// API payload shapes, mirroring the service's response models.

export interface PpaBody {
  total_area_mm2: number;
  memory_area_mm2: number;
  ff_count: number;
  comb_count: number;
  memory_count: number;
  leakage_mw: number;
  dynamic_w: number;
  total_w: number;
  fmax_mhz: number;
}

export interface CriticalPathBody {
  nodes: string[];
  total_delay_ns: number;
  contains_memory: boolean;
  memory_ids: string[];
}

export interface SessionState {
  session_id: string;
  fmax_mhz: number;
  ppa: PpaBody;
  critical_path: CriticalPathBody;
  undo_depth: number;
  memory_count: number;
  design_doc: string;
}

export interface TransformRequest {
  kind: "split_words" | "split_bits" | "pipeline";
  target: string;
  fan?: number | null;
}

export interface RecommendationBody {
  current_fmax_mhz: number;
  bottleneck: string | null;
  action_kind: string | null;
  action_target: string | null;
  action_fan: number | null;
  predicted_fmax_mhz: number;
  feasible: boolean;
  reason: string;
}

export interface PlanBody {
  achieved_fmax_mhz: number;
  feasible: boolean;
  iterations: number;
  transforms_applied: number;
  state: SessionState;
}

export interface MemoryAction {
  mem_id: string;
  words: number;
  word_bits: number;
  partition: string;
  on_critical_path: boolean;
  can_split_words: boolean;
  can_split_bits: boolean;
  split_words_reason: string;
  split_bits_reason: string;
}

export interface NetAction {
  net_id: string;
  can_pipeline: boolean;
}

export interface ActionsBody {
  memories: MemoryAction[];
  nets: NetAction[];
}

export interface FloorplanRect {
  partition: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface SpeedupCell {
  kernel: string;
  cus: number;
  raw: number;
  derated: number;
}

export interface SpeedupsBody {
  area_ratio_by_cu: Record<string, number>;
  cells: SpeedupCell[];
  max_raw: SpeedupCell;
  min_raw: SpeedupCell;
}
