import { describe, expect, it } from "vitest";

import { CockpitViewModel } from "../src/model.js";
import type { Snapshot } from "../src/wire.js";

function snapshot(tick: number, overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    session_state: "running",
    tick,
    time_s: tick / 1000,
    realtime_factor: 1.0,
    robot: {
      world_x_m: 0.5 + tick * 1e-4,
      y_m: 0.0,
      xdot_mps: 0.1,
      ydot_mps: 0.0,
      stance_foot_world_x_m: 0.45,
      phase: "ssp_left",
      phase_time_s: 0.1,
      stance_side: "left",
    },
    reference: { x_m: 0.01, xdot_mps: 0.1, xi_m: 0.02, xi_norm: 0.017, elongated: false },
    pilot: { com_x_m: 0.0, com_y_m: 0.0, contact_left: true, contact_right: false },
    forces: { f_hmi_n: 5.0, f_s_n: -2.0, f_ext_n: 0.0, f_ff_n: 1.0, f_fb_n: 0.5 },
    xi_r_norm: 0.02,
    last_step: null,
    fall: false,
    diverged: false,
    ...overrides,
  };
}

describe("CockpitViewModel", () => {
  it("fills series from snapshots", () => {
    const vm = new CockpitViewModel();
    vm.ingest(snapshot(10));
    vm.ingest(snapshot(20));
    expect(vm.snapshotCount).toBe(2);
    expect(vm.robotDcm.size).toBe(2);
    expect(vm.refDcm.size).toBe(2);
    expect(vm.latest?.tick).toBe(20);
  });

  it("ignores repeated heartbeat ticks for series data", () => {
    const vm = new CockpitViewModel();
    vm.ingest(snapshot(10));
    vm.ingest(snapshot(10, { session_state: "paused" }));
    expect(vm.robotDcm.size).toBe(1);
    expect(vm.latest?.session_state).toBe("paused");
  });

  it("clears the charts when the session restarts", () => {
    const vm = new CockpitViewModel();
    vm.ingest(snapshot(500));
    vm.ingest(snapshot(600));
    vm.ingest(snapshot(5)); // tick went backwards: fresh session
    expect(vm.robotDcm.size).toBe(1);
  });

  it("stores phase-portrait points in the stance frame", () => {
    const vm = new CockpitViewModel();
    vm.ingest(snapshot(10));
    const p = vm.portraitX.latest();
    expect(p?.v).toBeCloseTo(0.5 + 10 * 1e-4 - 0.45, 12);
  });

  it("collects acks and bounded errors", () => {
    const vm = new CockpitViewModel();
    vm.ingest({ type: "ack", applied_tick: null, detail: "ok" });
    for (let i = 0; i < 10; i++) vm.ingest({ type: "error", reason: `e${i}` });
    expect(vm.ackCount).toBe(1);
    expect(vm.errors.length).toBeLessThanOrEqual(6);
    expect(vm.errors[vm.errors.length - 1]).toBe("e9");
  });

  it("reports synchrony error from the latest samples", () => {
    const vm = new CockpitViewModel();
    vm.ingest(snapshot(10, { xi_r_norm: 0.05 }));
    expect(vm.synchronyError()).toBeCloseTo(0.05 - 0.017, 12);
  });
});
