// Line-JSON protocol spoken by the runtime service: newline-delimited
// JSON objects both ways, discriminated on the "t" field.  This module
// has no dependencies so the browser bundle stays import-map free.

export const JOINT_IDS = [
  "T-r",
  "T-p",
  "T-y",
  "lH-r",
  "lH-p",
  "lH-y",
  "lK-p",
  "lK-y",
  "rH-r",
  "rH-p",
  "rH-y",
  "rK-p",
  "rK-y",
] as const;

export type JointId = (typeof JOINT_IDS)[number];

export interface TelemetryFrame {
  F_lfoot: number;
  F_rfoot: number;
  F_foot: number;
  F_lhip: number;
  F_rhip: number;
  cmd: Record<JointId, number>;
}

export interface Telemetry {
  t: "telemetry";
  tick: number;
  state_i: number | null;
  u: number | null;
  frame: TelemetryFrame;
  pose: [number, number, number];
}

export interface Ok {
  t: "ok";
}

export interface Err {
  t: "err";
  code: string;
  detail?: string[];
}

export interface Transition {
  t: "transition";
  i: number;
  thre: number;
}

export interface Thresholds {
  t: "thresholds";
  values: number[];
}

export interface Done {
  t: "done";
}

export interface Fall {
  t: "fall";
}

export type ServerMessage =
  | Telemetry
  | Ok
  | Err
  | Transition
  | Thresholds
  | Done
  | Fall;

export type ClientMessage =
  | { t: "subscribe" }
  | { t: "load_motion"; name: string }
  | { t: "load_motion"; text: string }
  | { t: "teach_start" }
  | { t: "set_u"; v: number }
  | { t: "advance" }
  | { t: "repro_start"; loops?: number; deltas?: number[]; thresholds?: number[] }
  | { t: "compose"; plan: { motion: string; loops?: number }[] }
  | { t: "balancer"; on: boolean }
  | { t: "reset"; seed?: number };

export function encode(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isFrame(v: unknown): v is TelemetryFrame {
  if (typeof v !== "object" || v === null) return false;
  const f = v as Record<string, unknown>;
  for (const key of ["F_lfoot", "F_rfoot", "F_foot", "F_lhip", "F_rhip"]) {
    if (!isNum(f[key])) return false;
  }
  const cmd = f["cmd"];
  if (typeof cmd !== "object" || cmd === null) return false;
  for (const joint of JOINT_IDS) {
    if (!isNum((cmd as Record<string, unknown>)[joint])) return false;
  }
  return true;
}

/** Parse one inbound line; null for anything that is not a well-formed
 * server message.  Unknown extra fields are tolerated. */
export function parseServerLine(line: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg["t"]) {
    case "ok":
      return { t: "ok" };
    case "done":
      return { t: "done" };
    case "fall":
      return { t: "fall" };
    case "err": {
      if (typeof msg["code"] !== "string") return null;
      const detail = msg["detail"];
      if (detail === undefined) return { t: "err", code: msg["code"] };
      if (!Array.isArray(detail) || detail.some((d) => typeof d !== "string")) {
        return null;
      }
      return { t: "err", code: msg["code"], detail: detail as string[] };
    }
    case "transition": {
      if (!isNum(msg["i"]) || !isNum(msg["thre"])) return null;
      return { t: "transition", i: msg["i"], thre: msg["thre"] };
    }
    case "thresholds": {
      const values = msg["values"];
      if (!Array.isArray(values) || values.some((v) => !isNum(v))) return null;
      return { t: "thresholds", values: values as number[] };
    }
    case "telemetry": {
      const pose = msg["pose"];
      if (
        !isNum(msg["tick"]) ||
        !(msg["state_i"] === null || isNum(msg["state_i"])) ||
        !(msg["u"] === null || isNum(msg["u"])) ||
        !isFrame(msg["frame"]) ||
        !Array.isArray(pose) ||
        pose.length !== 3 ||
        pose.some((v) => !isNum(v))
      ) {
        return null;
      }
      return {
        t: "telemetry",
        tick: msg["tick"],
        state_i: msg["state_i"] as number | null,
        u: msg["u"] as number | null,
        frame: msg["frame"],
        pose: [pose[0], pose[1], pose[2]] as [number, number, number],
      };
    }
    default:
      return null;
  }
}

/** Splits a stream of text chunks into newline-terminated lines.  A
 * trailing fragment is held until its newline arrives; blank lines are
 * dropped.  Feed decoded text (the transport owns byte decoding). */
export class LineSplitter {
  private buf = "";

  push(chunk: string): string[] {
    this.buf += chunk;
    const parts = this.buf.split("\n");
    this.buf = parts.pop() ?? "";
    return parts.filter((p) => p.trim().length > 0);
  }

  /** Unterminated tail currently held. */
  pending(): string {
    return this.buf;
  }
}
