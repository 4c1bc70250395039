// Teach panel client: one transport, one panel state, and the slider
// coalescer and session recorder between them.  The engine is never
// mutated except through protocol messages sent here.

import { SliderCoalescer } from "./coalesce.js";
import {
  applyIntent,
  applyServer,
  advanceEnabled,
  clampSlider,
  initialPanel,
  sliderEnabled,
  type PanelState,
} from "./panel.js";
import {
  encode,
  parseServerLine,
  type ClientMessage,
  type ServerMessage,
} from "./protocol.js";
import { SessionRecorder } from "./recorder.js";

export interface Transport {
  send(line: string): void;
  onOpen(cb: () => void): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class TeachClient {
  private transport: Transport | null = null;
  private panel: PanelState = initialPanel();
  private coalescer = new SliderCoalescer();
  readonly recorder = new SessionRecorder();
  private wantSubscribe = false;
  private changeListeners: Array<(s: PanelState) => void> = [];
  private messageListeners: Array<(m: ServerMessage) => void> = [];

  get state(): PanelState {
    return this.panel;
  }

  onChange(cb: (s: PanelState) => void): void {
    this.changeListeners.push(cb);
  }

  onMessage(cb: (m: ServerMessage) => void): void {
    this.messageListeners.push(cb);
  }

  /** Wire a transport (initial connect or reconnect after a drop).  The
   * trajectory is kept, so telemetry resumes appending from the next
   * tick the server sends. */
  attach(transport: Transport): void {
    this.transport = transport;
    this.update(applyIntent(this.panel, { kind: "connecting" }));
    transport.onOpen(() => {
      this.update(applyIntent(this.panel, { kind: "connected" }));
      if (this.wantSubscribe) this.send({ t: "subscribe" });
    });
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => {
      this.update(applyIntent(this.panel, { kind: "dropped" }));
    });
  }

  close(): void {
    this.transport?.close();
    this.transport = null;
  }

  // -- operator intents --------------------------------------------------

  subscribe(): void {
    this.wantSubscribe = true;
    this.send({ t: "subscribe" });
  }

  loadMotion(name: string): void {
    this.update(applyIntent(this.panel, { kind: "load", motion: name }));
    this.send({ t: "load_motion", name });
  }

  loadMotionText(text: string, label = "custom"): void {
    this.update(applyIntent(this.panel, { kind: "load", motion: label }));
    this.send({ t: "load_motion", text });
  }

  teachStart(): void {
    this.update(applyIntent(this.panel, { kind: "teach_start" }));
    this.coalescer.reset();
    this.recorder.clear();
    this.send({ t: "teach_start" });
  }

  /** Slider drag.  Clamped to the engine's joint range, echoed in the
   * panel immediately, and sent at most once per tick. */
  sliderInput(v: number): void {
    if (!sliderEnabled(this.panel)) return;
    const clamped = clampSlider(v);
    this.update(applyIntent(this.panel, { kind: "slider", v: clamped }));
    this.coalescer.input(clamped);
  }

  advanceClick(): void {
    if (!advanceEnabled(this.panel)) return;
    // A drag the tick loop has not flushed yet targeted the state being
    // left; never fire it at the next state's joint.
    this.coalescer.clearPending();
    this.recorder.recordAdvance();
    this.send({ t: "advance" });
  }

  reproStart(loops = 1): void {
    this.update(applyIntent(this.panel, { kind: "repro_start" }));
    this.send({ t: "repro_start", loops });
  }

  setBalancer(on: boolean): void {
    this.send({ t: "balancer", on });
  }

  reset(seed?: number): void {
    this.update(applyIntent(this.panel, { kind: "reset" }));
    this.coalescer.reset();
    this.send(seed === undefined ? { t: "reset" } : { t: "reset", seed });
  }

  // -- stream handling ---------------------------------------------------

  private handleLine(line: string): void {
    const msg = parseServerLine(line);
    if (msg === null) return;
    if (msg.t === "telemetry") {
      this.recorder.sawTick(msg.tick);
      if (sliderEnabled(this.panel)) {
        const v = this.coalescer.flush();
        if (v !== null) {
          this.recorder.recordU(v);
          this.send({ t: "set_u", v });
        }
      }
    }
    this.update(applyServer(this.panel, msg));
    for (const cb of this.messageListeners) cb(msg);
  }

  private send(msg: ClientMessage): void {
    this.transport?.send(encode(msg));
  }

  private update(next: PanelState): void {
    if (next === this.panel) return;
    this.panel = next;
    for (const cb of this.changeListeners) cb(next);
  }
}
