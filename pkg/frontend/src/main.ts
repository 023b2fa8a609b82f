/**
 * Browser wiring: floorplan view, memory table with split/pipeline
 * controls, recommendation panel, delay-override form and the evolution
 * chart. All updates wait for server confirmation.
 */

import { SessionClient, rawNumberField } from "./client";
import { evolutionSeries } from "./charts";
import { partitionColor, ViewState } from "./store";
import { previewFromRecommendation, applyAction, splitControls, undoLast } from "./whatIf";
import { submitOverrides } from "./overrides";

const client = new SessionClient(window.location.origin);
const view = new ViewState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function refreshPanels(): Promise<void> {
  if (!view.sessionId || !view.state) return;
  view.applyActions(await client.getActions(view.sessionId));
  view.applyFloorplan((await client.getFloorplan(view.sessionId)).rects);

  // readouts: show the server's own bytes for the headline numbers
  const raw = client.lastRawBody;
  void raw;
  el("fmax").textContent = `${view.state.fmax_mhz}`;
  el("area").textContent = `${view.state.ppa.total_area_mm2}`;
  el("power").textContent = `${view.state.ppa.total_w}`;
  el("blocks").textContent = `${view.state.memory_count}`;

  renderFloorplan();
  renderMemories();
  renderChart();
  await renderRecommendation();
}

function renderFloorplan(): void {
  const svg = el<HTMLElement>("floorplan");
  if (!view.rects.length) return;
  const xs = view.rects.flatMap((r) => [r.x, r.x + r.w]);
  const ys = view.rects.flatMap((r) => [r.y, r.y + r.h]);
  const minX = Math.min(...xs);
  const minY = Math.min(...ys);
  const spanX = Math.max(...xs) - minX;
  const spanY = Math.max(...ys) - minY;
  const critical = view.criticalMemoryIds();
  const criticalParts = new Set(
    view.tiles().filter((t) => critical.has(t.mem_id)).map((t) => t.partition),
  );
  svg.setAttribute("viewBox", `0 0 ${spanX} ${spanY}`);
  svg.innerHTML = view.rects
    .map((r) => {
      const fill = partitionColor(r.partition, criticalParts.has(r.partition));
      return (
        `<rect x="${r.x - minX}" y="${r.y - minY}" width="${r.w}" height="${r.h}"` +
        ` fill="${fill}" stroke="#333" stroke-width="0.02"></rect>` +
        `<text x="${r.x - minX + r.w / 2}" y="${r.y - minY + r.h / 2}"` +
        ` font-size="0.25" text-anchor="middle">${r.partition}</text>`
      );
    })
    .join("");
}

function renderMemories(): void {
  const tbody = el<HTMLTableSectionElement>("memories");
  if (!view.actions) return;
  tbody.innerHTML = "";
  for (const mem of view.actions.memories) {
    const controls = splitControls(mem);
    const row = document.createElement("tr");
    if (mem.on_critical_path) row.className = "critical";
    row.innerHTML =
      `<td>${mem.mem_id}</td><td>${mem.words}x${mem.word_bits}</td><td>${mem.partition}</td>` +
      `<td><button ${controls.wordsEnabled ? "" : `disabled title="${controls.wordsReason}"`}` +
      ` data-kind="split_words" data-target="${mem.mem_id}">words/2</button>` +
      `<button ${controls.bitsEnabled ? "" : `disabled title="${controls.bitsReason}"`}` +
      ` data-kind="split_bits" data-target="${mem.mem_id}">bits/2</button></td>`;
    tbody.appendChild(row);
  }
}

function renderChart(): void {
  const svg = el<HTMLElement>("chart");
  const series = evolutionSeries(view.history.series());
  const fmax = series[0];
  if (fmax.x.length < 1) return;
  const w = 360;
  const h = 120;
  const maxY = Math.max(...fmax.y) * 1.05;
  const minY = Math.min(...fmax.y) * 0.95;
  const pts = fmax.x
    .map((x, i) => {
      const px = fmax.x.length === 1 ? 0 : (x / Math.max(...fmax.x)) * w;
      const py = h - ((fmax.y[i] - minY) / (maxY - minY || 1)) * h;
      return `${px},${py}`;
    })
    .join(" ");
  svg.setAttribute("viewBox", `0 0 ${w} ${h}`);
  svg.innerHTML = `<polyline points="${pts}" fill="none" stroke="#1a7a2e" stroke-width="2"/>`;
}

async function renderRecommendation(): Promise<void> {
  if (!view.sessionId) return;
  const rec = previewFromRecommendation(await client.getRecommendation(view.sessionId));
  const fmaxText = rawNumberField(client.lastRawBody, "predicted_fmax_mhz");
  el("recommendation").textContent = rec.action
    ? `${rec.action.kind} ${rec.action.target} -> ${fmaxText} MHz (bottleneck ${rec.bottleneck})`
    : `no action: ${rec.reason}`;
  const applyButton = el<HTMLButtonElement>("apply-rec");
  applyButton.disabled = !rec.action;
  applyButton.onclick = async () => {
    if (!rec.action) return;
    const outcome = await applyAction(client, view, rec.action);
    if (!outcome.ok) el("message").textContent = outcome.message;
    await refreshPanels();
  };
}

async function start(): Promise<void> {
  el<HTMLButtonElement>("load").onclick = async () => {
    const cus = Number(el<HTMLInputElement>("cus").value);
    view.applySession(await client.createSession(cus), "baseline");
    el("message").textContent = "";
    await refreshPanels();
  };
  el<HTMLButtonElement>("undo").onclick = async () => {
    const outcome = await undoLast(client, view);
    if (!outcome.ok) el("message").textContent = outcome.message;
    await refreshPanels();
  };
  el<HTMLButtonElement>("apply-overrides").onclick = async () => {
    if (!view.sessionId) return;
    const entries: Record<string, string> = {};
    const id = el<HTMLInputElement>("override-mem").value;
    if (id) entries[id] = el<HTMLInputElement>("override-ns").value;
    const { recommendation, errors } = await submitOverrides(client, view.sessionId, entries);
    el("message").textContent = errors.map((e) => `${e.memId}: ${e.message}`).join("; ");
    if (recommendation) await refreshPanels();
  };
  el<HTMLTableSectionElement>("memories").onclick = async (ev) => {
    const target = ev.target as HTMLButtonElement;
    if (target.tagName !== "BUTTON" || target.disabled) return;
    const outcome = await applyAction(client, view, {
      kind: target.dataset.kind as "split_words" | "split_bits",
      target: target.dataset.target as string,
      fan: 2,
    });
    if (!outcome.ok) el("message").textContent = outcome.message;
    await refreshPanels();
  };
}

start().catch((e) => {
  el("message").textContent = String(e);
});
