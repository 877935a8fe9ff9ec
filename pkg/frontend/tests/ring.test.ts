import { describe, expect, it } from "vitest";

import { RingBuffer } from "../src/ring.js";

function collect(rb: RingBuffer): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  rb.forEach((t, v) => out.push([t, v]));
  return out;
}

describe("RingBuffer", () => {
  it("stores samples in chronological order", () => {
    const rb = new RingBuffer(4);
    rb.push(0, 10);
    rb.push(1, 11);
    rb.push(2, 12);
    expect(rb.size).toBe(3);
    expect(collect(rb)).toEqual([
      [0, 10],
      [1, 11],
      [2, 12],
    ]);
  });

  it("overwrites the oldest sample past capacity", () => {
    const rb = new RingBuffer(3);
    for (let i = 0; i < 5; i++) rb.push(i, i * 10);
    expect(rb.size).toBe(3);
    expect(collect(rb)).toEqual([
      [2, 20],
      [3, 30],
      [4, 40],
    ]);
  });

  it("reports the latest sample", () => {
    const rb = new RingBuffer(2);
    expect(rb.latest()).toBeNull();
    rb.push(5, 1);
    rb.push(6, 2);
    expect(rb.latest()).toEqual({ t: 6, v: 2 });
  });

  it("computes extent within a trailing window", () => {
    const rb = new RingBuffer(10);
    rb.push(0, -5);
    rb.push(1, 3);
    rb.push(2, 7);
    expect(rb.extent(Infinity)).toEqual({ min: -5, max: 7 });
    expect(rb.extent(1.0)).toEqual({ min: 3, max: 7 });
  });

  it("clears", () => {
    const rb = new RingBuffer(2);
    rb.push(0, 1);
    rb.clear();
    expect(rb.size).toBe(0);
    expect(rb.latest()).toBeNull();
  });

  it("rejects a non-positive capacity", () => {
    expect(() => new RingBuffer(0)).toThrow();
  });
});
