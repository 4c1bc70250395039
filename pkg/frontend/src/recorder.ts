// Teaching session recorder.  Every message the panel actually sends is
// stamped with the tick the engine will apply it on: one past the last
// telemetry tick seen before sending.  The result serializes to the
// trace CSV that `seatwalk teach-replay` accepts, so a recorded session
// can be replayed headlessly into the same thresholds.

export interface TraceRow {
  tick: number;
  action: "u" | "advance";
  value: number;
}

export class SessionRecorder {
  private rows: TraceRow[] = [];
  private lastTick = -1;

  sawTick(tick: number): void {
    if (tick > this.lastTick) this.lastTick = tick;
  }

  recordU(v: number): void {
    this.rows.push({ tick: this.lastTick + 1, action: "u", value: v });
  }

  recordAdvance(): void {
    this.rows.push({ tick: this.lastTick + 1, action: "advance", value: 0 });
  }

  trace(): readonly TraceRow[] {
    return this.rows;
  }

  csv(): string {
    const lines = ["tick,action"];
    for (const row of this.rows) {
      lines.push(
        row.action === "advance"
          ? `${row.tick},ADVANCE`
          : `${row.tick},${row.value}`,
      );
    }
    return lines.join("\n") + "\n";
  }

  /** Largest number of slider rows sharing one tick; the coalescing
   * contract requires this to stay at or below 1. */
  maxSlidersPerTick(): number {
    const counts = new Map<number, number>();
    let max = 0;
    for (const row of this.rows) {
      if (row.action !== "u") continue;
      const n = (counts.get(row.tick) ?? 0) + 1;
      counts.set(row.tick, n);
      if (n > max) max = n;
    }
    return max;
  }

  clear(): void {
    this.rows = [];
  }
}
