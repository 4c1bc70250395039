// Browser bootstrap: binds the teach client to the bridge's SSE/POST
// line pipe and keeps the panel sections rendered.  All engine access
// goes through protocol messages; this file only moves strings.

import { TeachClient, type Transport } from "./client.js";
import {
  renderControls,
  renderGauges,
  renderStates,
  renderStatus,
  renderThresholds,
  renderTrajectory,
} from "./render.js";

/** EventSource down, POST /send up.  EventSource reconnects on its own,
 * firing open again, which makes the client resubscribe. */
class SseTransport implements Transport {
  private es: EventSource;
  private openCbs: Array<() => void> = [];
  private lineCbs: Array<(line: string) => void> = [];
  private closeCbs: Array<() => void> = [];

  constructor(
    private sendUrl: string,
    eventsUrl: string,
  ) {
    this.es = new EventSource(eventsUrl);
    this.es.onopen = () => {
      for (const cb of this.openCbs) cb();
    };
    this.es.onmessage = (ev) => {
      for (const cb of this.lineCbs) cb(String(ev.data));
    };
    this.es.onerror = () => {
      for (const cb of this.closeCbs) cb();
    };
  }

  send(line: string): void {
    void fetch(this.sendUrl, {
      method: "POST",
      headers: { "Content-Type": "text/plain" },
      body: line,
    });
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
    this.es.close();
  }
}

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing #${id}`);
  return el;
}

function mount(): void {
  const client = new TeachClient();

  const status = byId("status");
  const gauges = byId("gauges");
  const states = byId("states");
  const controls = byId("controls");
  const thresholds = byId("thresholds");
  const trajectory = byId("trajectory");

  let queued = false;
  const render = () => {
    queued = false;
    const s = client.state;
    status.innerHTML = renderStatus(s);
    gauges.innerHTML = renderGauges(s);
    states.innerHTML = renderStates(s);
    thresholds.innerHTML = renderThresholds(s);
    trajectory.innerHTML = renderTrajectory(s);
    // Re-rendering the slider mid-drag would break the drag.
    const active = document.activeElement;
    if (active === null || !controls.contains(active)) {
      controls.innerHTML = renderControls(s);
    }
  };
  client.onChange(() => {
    if (queued) return;
    queued = true;
    requestAnimationFrame(render);
  });

  // The slider and advance button are re-rendered, so handle their
  // events through the container.
  controls.addEventListener("input", (ev) => {
    const target = ev.target as HTMLInputElement;
    if (target.id === "slider") client.sliderInput(Number(target.value));
  });
  controls.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id === "advance") client.advanceClick();
  });

  const motionSelect = byId("motion") as HTMLSelectElement;
  byId("load").addEventListener("click", () => {
    client.loadMotion(motionSelect.value);
  });
  byId("teach").addEventListener("click", () => client.teachStart());
  byId("reproduce").addEventListener("click", () => {
    const loops = Number((byId("loops") as HTMLInputElement).value) || 1;
    client.reproStart(loops);
  });
  const balancer = byId("balancer") as HTMLInputElement;
  balancer.addEventListener("change", () => client.setBalancer(balancer.checked));
  byId("reset").addEventListener("click", () => client.reset());

  client.attach(new SseTransport("/send", "/events"));
  client.subscribe();
  render();
}

mount();
