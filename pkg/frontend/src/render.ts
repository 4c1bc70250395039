// HTML renderers for the panel: pure functions from PanelState to
// markup strings, so every view is testable without a DOM.  app.ts
// assigns the results to container elements and wires events.

import {
  advanceEnabled,
  sliderEnabled,
  SLIDER_LIMIT,
  type PanelState,
  type TrajPoint,
} from "./panel.js";

// Fall condition mirrored from the engine: the seat splits when the
// buttock imbalance exceeds this share of the remaining seat load.
export const FALL_RATIO = 0.8;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderStatus(s: PanelState): string {
  const parts = [`<span class="conn conn-${s.conn}">${s.conn}</span>`];
  if (s.conn === "retry") {
    parts.push(`<span class="banner retry-banner">connection lost, retrying</span>`);
  }
  if (s.fallen) {
    parts.push(`<span class="banner fall-banner">fallen, reset to continue</span>`);
  }
  if (s.lastError !== null) {
    parts.push(`<span class="inline-error">${esc(s.lastError)}</span>`);
  }
  const motion = s.motion === null ? "no motion" : esc(s.motion);
  parts.push(`<span class="motion">${motion}</span>`);
  parts.push(`<span class="mode">${s.mode}</span>`);
  return parts.join(" ");
}

function bar(label: string, value: number, scale: number): string {
  const pct = scale > 0 ? Math.min(100, Math.max(0, (value / scale) * 100)) : 0;
  return (
    `<div class="gauge"><span class="label">${label}</span>` +
    `<span class="val">${value.toFixed(1)} N</span>` +
    `<div class="bar"><div class="fill" style="width:${pct.toFixed(1)}%"></div></div></div>`
  );
}

/** Buttock and foot gauges.  The key balance display is the split
 * d = F_lhip - F_rhip against the fall limit FALL_RATIO * seat load. */
export function renderGauges(s: PanelState): string {
  const f = s.telemetry?.frame;
  if (f === undefined) return `<div class="gauges empty">no telemetry</div>`;
  const seat = f.F_lhip + f.F_rhip;
  const d = f.F_lhip - f.F_rhip;
  const limit = FALL_RATIO * seat;
  // Split bar: 0 at center, fall limit at either edge.
  const pos = limit > 0 ? 50 + Math.max(-50, Math.min(50, (d / limit) * 50)) : 50;
  return (
    `<div class="gauges">` +
    bar("F_lhip", f.F_lhip, 400) +
    bar("F_rhip", f.F_rhip, 400) +
    bar("F_lfoot", f.F_lfoot, 200) +
    bar("F_rfoot", f.F_rfoot, 200) +
    `<div class="gauge split"><span class="label">d</span>` +
    `<span class="val">${d.toFixed(1)} N</span>` +
    `<span class="limit">fall at &#177;${limit.toFixed(1)} N</span>` +
    `<div class="bar split-bar"><div class="mark" style="left:${pos.toFixed(1)}%"></div></div>` +
    `</div></div>`
  );
}

/** State strip: one chip per state taught or observed so far; the chip
 * for the last telemetry's state_i is highlighted. */
export function renderStates(s: PanelState): string {
  const seen = Math.max(
    s.thresholds.length + (s.complete ? 0 : 1),
    s.stateIndex ?? 0,
  );
  const chips: string[] = [];
  for (let i = 1; i <= seen; i++) {
    const current = s.stateIndex === i ? " current" : "";
    const thre =
      i <= s.thresholds.length
        ? `<span class="thre">${s.thresholds[i - 1]} N</span>`
        : "";
    chips.push(`<span class="state-chip${current}">${i}${thre}</span>`);
  }
  return `<div class="states">${chips.join("")}</div>`;
}

export function renderControls(s: PanelState): string {
  const sliderDis = sliderEnabled(s) ? "" : " disabled";
  const advanceDis = advanceEnabled(s) ? "" : " disabled";
  const u = s.telemetry?.u;
  const echo = `u = ${s.slider}` + (u === null || u === undefined ? "" : ` (applied ${u})`);
  return (
    `<input id="slider" type="range" min="-${SLIDER_LIMIT}" max="${SLIDER_LIMIT}"` +
    ` step="0.01" value="${s.slider}"${sliderDis}>` +
    `<span class="echo">${echo}</span>` +
    `<button id="advance"${advanceDis}>advance</button>`
  );
}

/** Learned thresholds; once complete, a download link for the same JSON
 * shape the CLI consumes. */
export function renderThresholds(s: PanelState): string {
  const chips = s.thresholds
    .map((v, i) => `<span class="thre-chip">${i + 1}: ${v} N</span>`)
    .join("");
  if (!s.complete) return `<div class="thresholds">${chips}</div>`;
  const payload = JSON.stringify({ motion: s.motion, values: s.thresholds });
  const href = `data:application/json,${encodeURIComponent(payload)}`;
  return (
    `<div class="thresholds complete">${chips}` +
    `<span class="complete-note">thresholds complete</span> ` +
    `<a id="download" download="thresholds.json" href="${href}">download</a></div>`
  );
}

interface Box {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

function bounds(points: readonly TrajPoint[]): Box {
  const box: Box = { minX: 0, maxX: 0, minY: 0, maxY: 0 };
  for (const p of points) {
    if (p.x < box.minX) box.minX = p.x;
    if (p.x > box.maxX) box.maxX = p.x;
    if (p.y < box.minY) box.minY = p.y;
    if (p.y > box.maxY) box.maxY = p.y;
  }
  return box;
}

export const TRAJ_W = 320;
export const TRAJ_H = 240;

/** Top-down trajectory: +x right, +y up, with short heading ticks along
 * the path. */
export function renderTrajectory(s: PanelState): string {
  const points = s.trajectory;
  if (points.length === 0) {
    return `<svg class="traj" viewBox="0 0 ${TRAJ_W} ${TRAJ_H}"></svg>`;
  }
  const box = bounds(points);
  const pad = 0.1 + 0.05 * Math.max(box.maxX - box.minX, box.maxY - box.minY);
  const spanX = box.maxX - box.minX + 2 * pad;
  const spanY = box.maxY - box.minY + 2 * pad;
  const scale = Math.min(TRAJ_W / spanX, TRAJ_H / spanY);
  const toX = (x: number) => ((x - box.minX + pad) * scale).toFixed(1);
  const toY = (y: number) => (TRAJ_H - (y - box.minY + pad) * scale).toFixed(1);
  const coords = points.map((p) => `${toX(p.x)},${toY(p.y)}`).join(" ");
  const every = Math.max(1, Math.ceil(points.length / 24));
  const len = 8 / scale;
  const ticks: string[] = [];
  for (let i = 0; i < points.length; i += every) {
    const p = points[i];
    const rad = (p.yaw * Math.PI) / 180;
    const hx = p.x + len * Math.cos(rad);
    const hy = p.y + len * Math.sin(rad);
    ticks.push(
      `<line class="heading" x1="${toX(p.x)}" y1="${toY(p.y)}"` +
        ` x2="${toX(hx)}" y2="${toY(hy)}"/>`,
    );
  }
  return (
    `<svg class="traj" viewBox="0 0 ${TRAJ_W} ${TRAJ_H}">` +
    `<polyline class="path" fill="none" points="${coords}"/>` +
    ticks.join("") +
    `</svg>`
  );
}
