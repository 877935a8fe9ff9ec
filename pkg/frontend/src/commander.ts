// Outgoing command stream with the client-side rate cap.
//
// Pilot intent (lean/tempo/stop) is coalesced latest-wins and flushed at
// most once per interval (default 50 ms = 20 Hz), so wiggling a slider
// cannot flood the server. Session control and the kick button are discrete
// user actions and pass through immediately.

import type { Command, PilotCommand } from "./wire.js";

export type SendFn = (cmd: Command) => void;

interface Scheduler {
  set(fn: () => void, ms: number): number;
  clear(id: number): void;
  now(): number;
}

const defaultScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
  now: () => Date.now(),
};

export class CommandThrottle {
  private pending: Omit<PilotCommand, "type"> = {};
  private timer: number | null = null;
  private lastFlush = -Infinity;
  sentCount = 0;

  constructor(
    private readonly send: SendFn,
    readonly minIntervalMs = 50,
    private readonly sched: Scheduler = defaultScheduler,
  ) {}

  setLean(lean: number): void {
    this.pending.lean = Math.max(-1, Math.min(1, lean));
    this.queueFlush();
  }

  setTempo(tempo: number): void {
    this.pending.tempo = Math.max(0, tempo);
    this.queueFlush();
  }

  stop(): void {
    this.pending.stop = true;
    this.flushNow();
  }

  /**
   * Trained-pilot stop: recenter the lean immediately, keep stepping while
   * the walking reference dies down, then cease stepping. Halting the gait
   * while still leaned elongates the reference with no step to absorb it
   * and can genuinely fell the robot.
   */
  stagedStop(settleMs = 1500): void {
    this.setLean(0);
    this.sched.set(() => this.stop(), settleMs);
  }

  kick(forceN = 30, durationS = 0.3): void {
    this.send({ type: "disturb", force_n: forceN, duration_s: durationS });
    this.sentCount += 1;
  }

  session(action: "start" | "pause" | "reset"): void {
    this.send({ type: "session", action });
    this.sentCount += 1;
  }

  private queueFlush(): void {
    if (this.timer !== null) return; // a flush is already scheduled
    const since = this.sched.now() - this.lastFlush;
    if (since >= this.minIntervalMs) {
      this.flushNow();
    } else {
      this.timer = this.sched.set(() => {
        this.timer = null;
        this.flushNow();
      }, this.minIntervalMs - since);
    }
  }

  private flushNow(): void {
    if (this.timer !== null) {
      this.sched.clear(this.timer);
      this.timer = null;
    }
    if (Object.keys(this.pending).length === 0) return;
    const cmd: PilotCommand = { type: "pilot", ...this.pending };
    this.pending = {};
    this.lastFlush = this.sched.now();
    this.send(cmd);
    this.sentCount += 1;
  }
}
