// End-to-end parity: a live teaching session performed through the
// panel client over TCP, recorded message by message, must replay
// through `seatwalk teach-replay` to the identical threshold set, and
// the recorded stream must hold the one-set_u-per-tick contract.
//
// The serving runtime runs unpaced, so the script waits out servo
// settling in observed ticks; by advance time the lagged sensors have
// converged to their double-precision fixed points, which is what makes
// live and replayed thresholds equal bit for bit.

import { spawn, execFile, type ChildProcess } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import path from "node:path";
import { afterAll, expect, test } from "vitest";

import { TeachClient } from "../src/client.js";
import { TcpTransport } from "../src/tcp.js";
import type { ServerMessage } from "../src/protocol.js";

const SEED = 7;
const children: ChildProcess[] = [];

afterAll(() => {
  for (const child of children) child.kill("SIGTERM");
});

function startServer(): Promise<{ child: ChildProcess; host: string; port: number }> {
  return new Promise((resolve, reject) => {
    const child = spawn(
      "python3",
      ["-m", "seatwalk.cli", "serve", "--fast", "--port", "0", "--seed", String(SEED)],
      { stdio: ["ignore", "pipe", "pipe"] },
    );
    children.push(child);
    let out = "";
    const timer = setTimeout(() => reject(new Error("no listening banner")), 20_000);
    const onData = (chunk: Buffer) => {
      out += chunk.toString();
      const m = out.match(/listening on ([\d.]+):(\d+)/);
      if (m) {
        clearTimeout(timer);
        child.stdout!.off("data", onData);
        resolve({ child, host: m[1], port: Number(m[2]) });
      }
    };
    child.stdout!.on("data", onData);
    child.on("error", (err) => {
      clearTimeout(timer);
      reject(err);
    });
  });
}

function teachReplay(trace: string): Promise<{ motion: string; values: number[] }> {
  return new Promise((resolve, reject) => {
    execFile(
      "python3",
      [
        "-m",
        "seatwalk.cli",
        "teach-replay",
        "--motion",
        "move_forward",
        "--trace",
        trace,
        "--seed",
        String(SEED),
      ],
      (err, stdout) => {
        if (err) {
          reject(err);
          return;
        }
        const lines = stdout.trim().split("\n");
        resolve(JSON.parse(lines[lines.length - 1]));
      },
    );
  });
}

interface Waiter {
  /** Latest telemetry tick seen so far. */
  lastTick(): number;
  /** Resolves once a telemetry with tick >= target has been seen.  The
   * unpaced server can run far ahead of this client, so settling must
   * be measured in server tick numbers, never in messages counted. */
  tickReached(target: number): Promise<void>;
  message(pred: (m: ServerMessage) => boolean): Promise<ServerMessage>;
}

function makeWaiter(client: TeachClient): Waiter {
  let last = -1;
  const msgWaiters: Array<{
    pred: (m: ServerMessage) => boolean;
    res: (m: ServerMessage) => void;
  }> = [];
  client.onMessage((m) => {
    if (m.t === "telemetry" && m.tick > last) last = m.tick;
    for (let i = msgWaiters.length - 1; i >= 0; i--) {
      if (msgWaiters[i].pred(m)) {
        msgWaiters[i].res(m);
        msgWaiters.splice(i, 1);
      }
    }
  });
  const deadline = <T>(p: Promise<T>, what: string): Promise<T> =>
    Promise.race([
      p,
      new Promise<T>((_, rej) =>
        setTimeout(() => rej(new Error(`timed out waiting for ${what}`)), 60_000),
      ),
    ]);
  const message = (
    pred: (m: ServerMessage) => boolean,
    what: string,
  ): Promise<ServerMessage> =>
    deadline(
      new Promise<ServerMessage>((res) => msgWaiters.push({ pred, res })),
      what,
    );
  return {
    lastTick: () => last,
    tickReached(target: number): Promise<void> {
      if (last >= target) return Promise.resolve();
      return message(
        (m) => m.t === "telemetry" && m.tick >= target,
        `tick ${target}`,
      ).then(() => undefined);
    },
    message: (pred) => message(pred, "a matching message"),
  };
}

test(
  "a recorded UI session replays to the identical threshold set",
  async () => {
    const { child, host, port } = await startServer();
    const client = new TeachClient();
    const waiter = makeWaiter(client);
    client.attach(new TcpTransport(host, port));
    client.subscribe();
    await waiter.message((m) => m.t === "telemetry");

    client.loadMotion("move_forward");
    client.teachStart();
    await waiter.tickReached(waiter.lastTick() + 2);

    // One slider pass per state: a short drag (several inputs inside a
    // tick window plus a mid-drag stop), then servo settling measured
    // from the telemetry that confirms the target value was applied,
    // then advance.  Targets mirror the published gait.
    const plan: Array<[number, number]> = [
      [-10, 150],
      [51.3, 50],
      [7.16, 150],
      [90, 50],
    ];
    let inputCount = 0;
    for (const [target, settle] of plan) {
      client.sliderInput(target / 3);
      client.sliderInput(target / 2);
      inputCount += 2;
      await waiter.tickReached(waiter.lastTick() + 3);
      client.sliderInput(target * 0.9);
      client.sliderInput(target);
      inputCount += 2;
      const applied = await waiter.message(
        (m) => m.t === "telemetry" && m.u === target,
      );
      if (applied.t !== "telemetry") throw new Error("unreachable");
      await waiter.tickReached(applied.tick + settle);
      const reply = waiter.message(
        (m) => m.t === "transition" || m.t === "thresholds",
      );
      client.advanceClick();
      await reply;
    }

    expect(client.state.complete).toBe(true);
    const live = [...client.state.thresholds];
    expect(live.length).toBe(4);
    expect(live[0]).toBeCloseTo(0.0, 6);
    expect(live[1]).toBeCloseTo(51.3, 6);
    expect(live[2]).toBeCloseTo(75.8, 6);
    expect(live[3]).toBeCloseTo(90.0, 6);

    // Coalescing: strictly fewer messages than drag inputs, and never
    // two slider rows on one tick.
    const rows = client.recorder.trace();
    const sliderRows = rows.filter((r) => r.action === "u");
    expect(client.recorder.maxSlidersPerTick()).toBeLessThanOrEqual(1);
    expect(sliderRows.length).toBeLessThan(inputCount);
    expect(sliderRows.length).toBeGreaterThanOrEqual(plan.length);
    expect(rows.filter((r) => r.action === "advance").length).toBe(4);

    const dir = await mkdtemp(path.join(tmpdir(), "teach-ui-"));
    const trace = path.join(dir, "session.trace.csv");
    await writeFile(trace, client.recorder.csv());
    try {
      const replayed = await teachReplay(trace);
      expect(replayed.motion).toBe("move_forward");
      expect(replayed.values.length).toBe(live.length);
      for (let i = 0; i < live.length; i++) {
        expect(replayed.values[i]).toBe(live[i]);
      }
    } finally {
      await rm(dir, { recursive: true, force: true });
      client.close();
      child.kill("SIGTERM");
    }
  },
  180_000,
);
