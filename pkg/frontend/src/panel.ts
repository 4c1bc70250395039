// Panel state and its reducers.  The server stream is the only source
// of sensor truth: the rendered state index always equals the last
// telemetry's state_i, and the trajectory appends monotonically by
// tick.  UI intents switch the local mode optimistically; an err reply
// is surfaced inline rather than guessed around.

import type { ServerMessage, Telemetry } from "./protocol.js";

export type ConnStatus = "idle" | "connecting" | "connected" | "retry";

export type Mode = "idle" | "teach" | "reproduce";

export interface TrajPoint {
  tick: number;
  x: number;
  y: number;
  yaw: number;
}

export interface PanelState {
  conn: ConnStatus;
  motion: string | null;
  mode: Mode;
  stateIndex: number | null;
  slider: number;
  telemetry: Telemetry | null;
  thresholds: number[];
  complete: boolean;
  /** Append-only; reducers reuse the array so a long session stays O(1)
   * per tick.  Renderers must treat it as read-only. */
  trajectory: TrajPoint[];
  fallen: boolean;
  lastError: string | null;
}

// Engine joint range; slider input is clamped to it client-side.
export const SLIDER_LIMIT = 120;

export function initialPanel(): PanelState {
  return {
    conn: "idle",
    motion: null,
    mode: "idle",
    stateIndex: null,
    slider: 0,
    telemetry: null,
    thresholds: [],
    complete: false,
    trajectory: [],
    fallen: false,
    lastError: null,
  };
}

export function clampSlider(v: number): number {
  if (!Number.isFinite(v)) return 0;
  return Math.max(-SLIDER_LIMIT, Math.min(SLIDER_LIMIT, v));
}

export function sliderEnabled(s: PanelState): boolean {
  return s.mode === "teach" && !s.fallen && !s.complete;
}

export function advanceEnabled(s: PanelState): boolean {
  return s.mode === "teach" && !s.fallen && !s.complete;
}

export function applyServer(s: PanelState, m: ServerMessage): PanelState {
  switch (m.t) {
    case "ok":
      return s;
    case "err": {
      const text = m.detail ? `${m.code}: ${m.detail.join("; ")}` : m.code;
      return { ...s, lastError: text };
    }
    case "telemetry": {
      const last = s.trajectory[s.trajectory.length - 1];
      if (last === undefined || m.tick > last.tick) {
        s.trajectory.push({
          tick: m.tick,
          x: m.pose[0],
          y: m.pose[1],
          yaw: m.pose[2],
        });
      }
      return { ...s, telemetry: m, stateIndex: m.state_i };
    }
    case "transition": {
      // Reproduction transitions are broadcast too; only a teaching
      // session grows the learned list.
      if (s.mode !== "teach") return s;
      return { ...s, thresholds: [...s.thresholds, m.thre] };
    }
    case "thresholds":
      return { ...s, thresholds: [...m.values], complete: true, mode: "idle" };
    case "done":
      return { ...s, mode: "idle" };
    case "fall":
      return { ...s, fallen: true, mode: "idle" };
  }
}

export type Intent =
  | { kind: "connecting" }
  | { kind: "connected" }
  | { kind: "dropped" }
  | { kind: "load"; motion: string }
  | { kind: "teach_start" }
  | { kind: "slider"; v: number }
  | { kind: "repro_start" }
  | { kind: "reset" };

export function applyIntent(s: PanelState, intent: Intent): PanelState {
  switch (intent.kind) {
    case "connecting":
      return { ...s, conn: "connecting" };
    case "connected":
      return { ...s, conn: "connected" };
    case "dropped":
      return { ...s, conn: "retry" };
    case "load":
      return {
        ...s,
        motion: intent.motion,
        mode: "idle",
        thresholds: [],
        complete: false,
        lastError: null,
      };
    case "teach_start":
      return { ...s, mode: "teach", thresholds: [], complete: false, lastError: null };
    case "slider":
      return { ...s, slider: clampSlider(intent.v) };
    case "repro_start":
      return { ...s, mode: "reproduce", lastError: null };
    case "reset":
      // Learned thresholds survive a reset on the engine side; the pose
      // history and the fall banner do not.
      return {
        ...s,
        mode: "idle",
        fallen: false,
        trajectory: [],
        telemetry: null,
        stateIndex: null,
        lastError: null,
      };
  }
}
