// Cockpit view model: the only state the UI renders from. It is fed purely
// by the snapshot stream, so closing and reopening the page reproduces the
// same charts; nothing here ever mutates simulation state.

import { RingBuffer } from "./ring.js";
import type { ServerMessage, Snapshot } from "./wire.js";

export type ConnectionState = "connecting" | "open" | "closed";

const SERIES_CAPACITY = 900; // ~15 s at 60 Hz
const PORTRAIT_CAPACITY = 1200;
const ERROR_LOG_LIMIT = 6;

export class CockpitViewModel {
  connection: ConnectionState = "connecting";
  latest: Snapshot | null = null;
  snapshotCount = 0;
  ackCount = 0;
  errors: string[] = [];

  // synchrony strip chart
  readonly robotDcm = new RingBuffer(SERIES_CAPACITY);
  readonly refDcm = new RingBuffer(SERIES_CAPACITY);
  // pilot force gauges over time
  readonly fHmi = new RingBuffer(SERIES_CAPACITY);
  readonly fSpring = new RingBuffer(SERIES_CAPACITY);
  readonly fExt = new RingBuffer(SERIES_CAPACITY);
  readonly speed = new RingBuffer(SERIES_CAPACITY);
  // phase portrait (stance-frame CoM position vs velocity)
  readonly portraitX = new RingBuffer(PORTRAIT_CAPACITY);
  readonly portraitV = new RingBuffer(PORTRAIT_CAPACITY);

  private lastTick = -1;

  setConnection(state: ConnectionState): void {
    this.connection = state;
  }

  ingest(msg: ServerMessage): void {
    switch (msg.type) {
      case "ack":
        this.ackCount += 1;
        return;
      case "error":
        this.errors.push(msg.reason);
        if (this.errors.length > ERROR_LOG_LIMIT) this.errors.shift();
        return;
      case "snapshot":
        this.ingestSnapshot(msg);
    }
  }

  private ingestSnapshot(snap: Snapshot): void {
    // a tick moving backwards means the session was reset: start charts over
    if (snap.tick < this.lastTick) this.clearSeries();
    this.latest = snap;
    this.snapshotCount += 1;
    if (snap.tick === this.lastTick) return; // paused heartbeat, no new data
    this.lastTick = snap.tick;

    const t = snap.time_s;
    this.robotDcm.push(t, snap.xi_r_norm);
    this.refDcm.push(t, snap.reference.xi_norm);
    this.fHmi.push(t, snap.forces.f_hmi_n);
    this.fSpring.push(t, snap.forces.f_s_n);
    this.fExt.push(t, snap.forces.f_ext_n);
    this.speed.push(t, snap.robot.xdot_mps);
    const stanceFrameX = snap.robot.world_x_m - snap.robot.stance_foot_world_x_m;
    this.portraitX.push(t, stanceFrameX);
    this.portraitV.push(t, snap.robot.xdot_mps);
  }

  clearSeries(): void {
    for (const rb of [
      this.robotDcm,
      this.refDcm,
      this.fHmi,
      this.fSpring,
      this.fExt,
      this.speed,
      this.portraitX,
      this.portraitV,
    ]) {
      rb.clear();
    }
    this.lastTick = -1;
  }

  sessionState(): string {
    return this.latest?.session_state ?? "idle";
  }

  /** Worst recent synchrony error, handy for a status readout. */
  synchronyError(): number {
    const a = this.robotDcm.latest();
    const b = this.refDcm.latest();
    if (!a || !b) return 0;
    return Math.abs(a.v - b.v);
  }
}
