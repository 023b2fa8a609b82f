/**
 * Measured-delay override form: the designer types access delays per
 * memory block; the server recomputes the bottleneck and recommendation.
 * Field validation (numeric, positive) happens client-side before any
 * request is sent.
 */

import { SessionClient } from "./client";
import type { RecommendationBody } from "./types";

export interface FieldError {
  memId: string;
  message: string;
}

export function validateEntries(entries: Record<string, string>): {
  delays: Record<string, number>;
  errors: FieldError[];
} {
  const delays: Record<string, number> = {};
  const errors: FieldError[] = [];
  for (const [memId, raw] of Object.entries(entries)) {
    const text = raw.trim();
    if (text === "") continue; // blank rows are simply omitted
    const value = Number(text);
    if (!Number.isFinite(value)) {
      errors.push({ memId, message: `'${raw}' is not a number` });
    } else if (value <= 0) {
      errors.push({ memId, message: "delay must be positive" });
    } else {
      delays[memId] = value;
    }
  }
  return { delays, errors };
}

export async function submitOverrides(
  client: SessionClient,
  sid: string,
  entries: Record<string, string>,
): Promise<{ recommendation: RecommendationBody | null; errors: FieldError[] }> {
  const { delays, errors } = validateEntries(entries);
  if (errors.length) return { recommendation: null, errors };
  const recommendation = Object.keys(delays).length
    ? await client.setMeasuredDelays(sid, delays)
    : await client.clearMeasuredDelays(sid);
  return { recommendation, errors: [] };
}
