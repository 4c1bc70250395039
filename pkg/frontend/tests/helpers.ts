// Shared fixtures: a telemetry builder and a scriptable transport.

import type { Transport } from "../src/client.js";
import {
  JOINT_IDS,
  type JointId,
  type ServerMessage,
  type Telemetry,
} from "../src/protocol.js";

export function neutralCmd(): Record<JointId, number> {
  const cmd = {} as Record<JointId, number>;
  for (const joint of JOINT_IDS) cmd[joint] = 0;
  cmd["lK-p"] = 90;
  cmd["rK-p"] = 90;
  return cmd;
}

export function telemetry(tick: number, over: Partial<Telemetry> = {}): Telemetry {
  return {
    t: "telemetry",
    tick,
    state_i: null,
    u: null,
    frame: {
      F_lfoot: 20,
      F_rfoot: 20,
      F_foot: 40,
      F_lhip: 180,
      F_rhip: 180,
      cmd: neutralCmd(),
    },
    pose: [0, 0, 0],
    ...over,
  };
}

/** In-memory transport driven by the test: `feed` delivers a server
 * message, `open`/`drop` fire the connection callbacks, and everything
 * the client sent sits in `sent`. */
export class FakeTransport implements Transport {
  sent: string[] = [];
  closed = false;
  private openCbs: Array<() => void> = [];
  private lineCbs: Array<(line: string) => void> = [];
  private closeCbs: Array<() => void> = [];

  send(line: string): void {
    this.sent.push(line);
  }

  onOpen(cb: () => void): void {
    this.openCbs.push(cb);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCbs.push(cb);
  }

  onClose(cb: () => void): void {
    this.closeCbs.push(cb);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    for (const cb of this.openCbs) cb();
  }

  feed(msg: ServerMessage | Record<string, unknown>): void {
    const line = JSON.stringify(msg);
    for (const cb of this.lineCbs) cb(line);
  }

  drop(): void {
    for (const cb of this.closeCbs) cb();
  }

  sentMessages(): Array<Record<string, unknown>> {
    return this.sent
      .join("")
      .split("\n")
      .filter((l) => l.length > 0)
      .map((l) => JSON.parse(l) as Record<string, unknown>);
  }
}
