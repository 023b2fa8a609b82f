/**
 * Chart series builders: the fmax/area/power evolution over iterations and
 * the per-kernel speedup bars. Pure data shaping; rendering lives in main.
 */

import type { HistoryPoint } from "./history";
import type { SpeedupCell } from "./types";

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export function evolutionSeries(points: HistoryPoint[]): Series[] {
  const x = points.map((p) => p.iteration);
  return [
    { label: "fmax (MHz)", x, y: points.map((p) => p.fmax_mhz) },
    { label: "area (mm2)", x, y: points.map((p) => p.total_area_mm2) },
    { label: "power (W)", x, y: points.map((p) => p.total_w) },
  ];
}

export interface BarGroup {
  kernel: string;
  cus: number[];
  values: number[];
}

export function speedupBars(cells: SpeedupCell[], metric: "raw" | "derated"): BarGroup[] {
  const byKernel = new Map<string, SpeedupCell[]>();
  for (const cell of cells) {
    const group = byKernel.get(cell.kernel) ?? [];
    group.push(cell);
    byKernel.set(cell.kernel, group);
  }
  const out: BarGroup[] = [];
  for (const [kernel, group] of byKernel) {
    group.sort((a, b) => a.cus - b.cus);
    out.push({
      kernel,
      cus: group.map((c) => c.cus),
      values: group.map((c) => c[metric]),
    });
  }
  return out;
}
