/**
 * Iteration history for the evolution charts: one point per committed
 * transform (or plan), carrying the server-reported fmax/area/power.
 * Undo truncates back to the previous point.
 */

export interface HistoryPoint {
  iteration: number;
  fmax_mhz: number;
  total_area_mm2: number;
  total_w: number;
  label: string;
}

export class History {
  private points: HistoryPoint[] = [];

  get length(): number {
    return this.points.length;
  }

  get current(): HistoryPoint | null {
    return this.points.length ? this.points[this.points.length - 1] : null;
  }

  push(fmaxMhz: number, totalAreaMm2: number, totalW: number, label: string): HistoryPoint {
    const point: HistoryPoint = {
      iteration: this.points.length,
      fmax_mhz: fmaxMhz,
      total_area_mm2: totalAreaMm2,
      total_w: totalW,
      label,
    };
    this.points.push(point);
    return point;
  }

  /** Drop the newest point (after a server-confirmed undo). */
  truncate(): HistoryPoint | null {
    if (this.points.length === 0) return null;
    this.points.pop();
    return this.current;
  }

  series(): HistoryPoint[] {
    return [...this.points];
  }
}
