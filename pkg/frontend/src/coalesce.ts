// Slider traffic shaping: the panel may emit at most one set_u per tick
// period.  Drag input lands in `input`; `flush` runs once per received
// telemetry tick and yields the value to send, if any.  The last value
// wins; a value equal to the last one sent is not resent.

export class SliderCoalescer {
  private pending: number | null = null;
  private lastSent: number | null = null;

  input(v: number): void {
    this.pending = v;
  }

  flush(): number | null {
    if (this.pending === null) return null;
    const v = this.pending;
    this.pending = null;
    if (v === this.lastSent) return null;
    this.lastSent = v;
    return v;
  }

  /** Drop unsent input, e.g. when the state it targeted has advanced. */
  clearPending(): void {
    this.pending = null;
  }

  reset(): void {
    this.pending = null;
    this.lastSent = null;
  }
}
