import { describe, expect, it } from "vitest";

import { CommandThrottle } from "../src/commander.js";
import type { Command } from "../src/wire.js";

/** Deterministic scheduler so the tests control time explicitly. */
class FakeScheduler {
  now_ = 0;
  private timers = new Map<number, { at: number; fn: () => void }>();
  private nextId = 1;

  set = (fn: () => void, ms: number): number => {
    const id = this.nextId++;
    this.timers.set(id, { at: this.now_ + ms, fn });
    return id;
  };

  clear = (id: number): void => {
    this.timers.delete(id);
  };

  now = (): number => this.now_;

  advance(ms: number): void {
    const target = this.now_ + ms;
    for (;;) {
      let next: { id: number; at: number; fn: () => void } | null = null;
      for (const [id, t] of this.timers) {
        if (t.at <= target && (next === null || t.at < next.at)) {
          next = { id, ...t };
        }
      }
      if (next === null) break;
      this.timers.delete(next.id);
      this.now_ = next.at;
      next.fn();
    }
    this.now_ = target;
  }
}

function setup() {
  const sent: Command[] = [];
  const sched = new FakeScheduler();
  const throttle = new CommandThrottle((c) => sent.push(c), 50, sched);
  return { sent, sched, throttle };
}

describe("CommandThrottle", () => {
  it("sends the first pilot command immediately", () => {
    const { sent, throttle } = setup();
    throttle.setLean(0.5);
    expect(sent).toEqual([{ type: "pilot", lean: 0.5 }]);
  });

  it("caps rapid slider wiggle at the configured rate", () => {
    const { sent, sched, throttle } = setup();
    // 2 seconds of 5 ms wiggles = 400 updates
    for (let i = 0; i < 400; i++) {
      throttle.setLean((i % 20) / 20);
      sched.advance(5);
    }
    // at 50 ms per flush, at most ~41 messages can leave in 2 s
    expect(sent.length).toBeLessThanOrEqual(41);
    expect(sent.length).toBeGreaterThan(30);
  });

  it("coalesces fields latest-wins", () => {
    const { sent, sched, throttle } = setup();
    throttle.setLean(0.1); // flushes immediately
    throttle.setLean(0.2);
    throttle.setTempo(2.0);
    throttle.setLean(0.9);
    sched.advance(50);
    expect(sent).toHaveLength(2);
    expect(sent[1]).toEqual({ type: "pilot", lean: 0.9, tempo: 2.0 });
  });

  it("clamps lean and tempo into range", () => {
    const { sent, sched, throttle } = setup();
    throttle.setLean(4.2);
    sched.advance(60);
    throttle.setTempo(-3);
    sched.advance(60);
    expect(sent[0]).toEqual({ type: "pilot", lean: 1 });
    expect(sent[1]).toEqual({ type: "pilot", tempo: 0 });
  });

  it("kick emits the 30 N / 0.3 s disturbance immediately", () => {
    const { sent, throttle } = setup();
    throttle.kick();
    expect(sent).toEqual([{ type: "disturb", force_n: 30, duration_s: 0.3 }]);
  });

  it("stop flushes pending intent immediately", () => {
    const { sent, sched, throttle } = setup();
    throttle.setLean(0.3); // immediate
    throttle.setLean(0.0); // pending
    throttle.stop();       // forces the flush
    expect(sent).toHaveLength(2);
    expect(sent[1]).toEqual({ type: "pilot", lean: 0.0, stop: true });
    sched.advance(200);
    expect(sent).toHaveLength(2);
  });

  it("session controls pass straight through", () => {
    const { sent, throttle } = setup();
    throttle.session("start");
    throttle.session("pause");
    expect(sent).toEqual([
      { type: "session", action: "start" },
      { type: "session", action: "pause" },
    ]);
  });

  it("staged stop recenters first and halts stepping later", () => {
    const { sent, sched, throttle } = setup();
    throttle.stagedStop(1500);
    expect(sent).toEqual([{ type: "pilot", lean: 0 }]);
    sched.advance(1499);
    expect(sent).toHaveLength(1);
    sched.advance(2);
    expect(sent).toHaveLength(2);
    expect(sent[1]).toEqual({ type: "pilot", stop: true });
  });
});
