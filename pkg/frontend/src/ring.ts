// Bounded ring buffer for time-stamped samples. Rendering iterates in
// chronological order without allocating; pushing past capacity overwrites
// the oldest sample.

export class RingBuffer {
  private readonly times: Float64Array;
  private readonly values: Float64Array;
  private head = 0; // next write position
  private count = 0;

  constructor(readonly capacity: number) {
    if (capacity <= 0 || !Number.isInteger(capacity)) {
      throw new Error(`capacity must be a positive integer, got ${capacity}`);
    }
    this.times = new Float64Array(capacity);
    this.values = new Float64Array(capacity);
  }

  get size(): number {
    return this.count;
  }

  push(t: number, v: number): void {
    this.times[this.head] = t;
    this.values[this.head] = v;
    this.head = (this.head + 1) % this.capacity;
    if (this.count < this.capacity) this.count += 1;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
  }

  /** Oldest-to-newest iteration. */
  forEach(fn: (t: number, v: number, i: number) => void): void {
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let i = 0; i < this.count; i++) {
      const j = (start + i) % this.capacity;
      fn(this.times[j], this.values[j], i);
    }
  }

  latest(): { t: number; v: number } | null {
    if (this.count === 0) return null;
    const j = (this.head - 1 + this.capacity) % this.capacity;
    return { t: this.times[j], v: this.values[j] };
  }

  /** Min/max of values within the trailing time window (for axis scaling). */
  extent(windowS: number): { min: number; max: number } | null {
    const last = this.latest();
    if (last === null) return null;
    let min = Infinity;
    let max = -Infinity;
    this.forEach((t, v) => {
      if (t >= last.t - windowS) {
        if (v < min) min = v;
        if (v > max) max = v;
      }
    });
    return min <= max ? { min, max } : null;
  }
}
