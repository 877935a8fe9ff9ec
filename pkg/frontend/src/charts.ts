// Canvas renderers. Each function repaints one panel from the view model;
// all of them are pure draw calls with no retained state beyond the canvas.

import type { RingBuffer } from "./ring.js";
import type { Snapshot } from "./wire.js";

const GRID = "#2a3140";
const TEXT = "#8b98ad";

interface Series {
  data: RingBuffer;
  color: string;
  label: string;
}

function clear(ctx: CanvasRenderingContext2D, w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#151a22";
  ctx.fillRect(0, 0, w, h);
}

function niceExtent(lo: number, hi: number, minSpan: number): [number, number] {
  if (hi - lo < minSpan) {
    const mid = 0.5 * (lo + hi);
    return [mid - 0.5 * minSpan, mid + 0.5 * minSpan];
  }
  const pad = 0.1 * (hi - lo);
  return [lo - pad, hi + pad];
}

export function drawStripChart(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  series: Series[],
  windowS: number,
  minSpan = 0.02,
): void {
  clear(ctx, w, h);
  let tEnd = -Infinity;
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    const last = s.data.latest();
    if (last) tEnd = Math.max(tEnd, last.t);
    const ext = s.data.extent(windowS);
    if (ext) {
      lo = Math.min(lo, ext.min);
      hi = Math.max(hi, ext.max);
    }
  }
  if (!Number.isFinite(tEnd)) return;
  const [yLo, yHi] = niceExtent(Math.min(lo, 0), Math.max(hi, 0), minSpan);
  const tStart = tEnd - windowS;
  const px = (t: number) => ((t - tStart) / windowS) * w;
  const py = (v: number) => h - ((v - yLo) / (yHi - yLo)) * h;

  // zero line
  ctx.strokeStyle = GRID;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, py(0));
  ctx.lineTo(w, py(0));
  ctx.stroke();

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let started = false;
    s.data.forEach((t, v) => {
      if (t < tStart) return;
      const x = px(t);
      const y = py(v);
      if (!started) {
        ctx.moveTo(x, y);
        started = true;
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
  }

  ctx.font = "11px system-ui, sans-serif";
  let lx = 8;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, 14);
    lx += ctx.measureText(s.label).width + 14;
  }
  ctx.fillStyle = TEXT;
  ctx.fillText(yHi.toFixed(3), w - 48, 12);
  ctx.fillText(yLo.toFixed(3), w - 48, h - 4);
}

export function drawPhasePortrait(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  xs: RingBuffer,
  vs: RingBuffer,
): void {
  clear(ctx, w, h);
  const ex = xs.extent(Infinity);
  const ev = vs.extent(Infinity);
  if (!ex || !ev) return;
  const [xLo, xHi] = niceExtent(Math.min(ex.min, -0.02), Math.max(ex.max, 0.02), 0.04);
  const [vLo, vHi] = niceExtent(Math.min(ev.min, -0.05), Math.max(ev.max, 0.05), 0.1);
  const px = (x: number) => ((x - xLo) / (xHi - xLo)) * w;
  const py = (v: number) => h - ((v - vLo) / (vHi - vLo)) * h;

  ctx.strokeStyle = GRID;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(px(0), 0);
  ctx.lineTo(px(0), h);
  ctx.moveTo(0, py(0));
  ctx.lineTo(w, py(0));
  ctx.stroke();

  // trail: gather both rings in lockstep (same length by construction)
  const pts: Array<[number, number]> = [];
  const vList: number[] = [];
  vs.forEach((_, v) => vList.push(v));
  xs.forEach((_, x, i) => {
    if (i < vList.length) pts.push([x, vList[i]]);
  });
  ctx.strokeStyle = "#61d0a8";
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  pts.forEach(([x, v], i) => {
    if (i === 0) ctx.moveTo(px(x), py(v));
    else ctx.lineTo(px(x), py(v));
  });
  ctx.stroke();
  const last = pts[pts.length - 1];
  if (last) {
    ctx.fillStyle = "#e7f0dd";
    ctx.beginPath();
    ctx.arc(px(last[0]), py(last[1]), 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.fillStyle = TEXT;
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText("x (m)", w - 38, py(0) - 6);
  ctx.fillText("v (m/s)", px(0) + 6, 12);
}

export function drawSideView(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  snap: Snapshot | null,
): void {
  clear(ctx, w, h);
  const ground = h - 24;
  ctx.strokeStyle = "#3b4456";
  ctx.beginPath();
  ctx.moveTo(0, ground);
  ctx.lineTo(w, ground);
  ctx.stroke();
  if (!snap) return;

  const scale = 220; // px per metre
  const comX = snap.robot.world_x_m;
  // keep the robot in frame: camera follows the CoM
  const cam = comX - (w * 0.5) / scale;
  const px = (x: number) => (x - cam) * scale;
  const comHeightPx = 120;

  // distance ticks every 0.5 m
  ctx.fillStyle = TEXT;
  ctx.font = "10px system-ui, sans-serif";
  const first = Math.ceil(cam / 0.5) * 0.5;
  for (let x = first; x < cam + w / scale; x += 0.5) {
    const sx = px(x);
    ctx.fillRect(sx, ground, 1, 4);
    ctx.fillText(x.toFixed(1), sx - 8, ground + 16);
  }

  const stanceX = px(snap.robot.stance_foot_world_x_m);
  const comPx = px(comX);
  const comPy = ground - comHeightPx;

  // reference pendulum ghost, scaled into robot units around the stance foot
  const refX = stanceX + snap.reference.x_m * scale * 0.4583;
  ctx.strokeStyle = "#5a6d91";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(stanceX, ground);
  ctx.lineTo(refX, comPy);
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#5a6d91";
  ctx.beginPath();
  ctx.arc(refX, comPy, 7, 0, 2 * Math.PI);
  ctx.fill();

  // stance leg + CoM
  ctx.strokeStyle = "#d7a65a";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(stanceX, ground);
  ctx.lineTo(comPx, comPy);
  ctx.stroke();
  // feet markers
  ctx.fillStyle = snap.pilot.contact_left ? "#d7a65a" : "#57607a";
  ctx.fillRect(stanceX - 8, ground - 3, 16, 3);
  ctx.fillStyle = "#e7f0dd";
  ctx.beginPath();
  ctx.arc(comPx, comPy, 9, 0, 2 * Math.PI);
  ctx.fill();

  ctx.fillStyle = TEXT;
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText(
    `${snap.robot.phase}  x=${comX.toFixed(2)} m  v=${snap.robot.xdot_mps.toFixed(2)} m/s`,
    8,
    16,
  );
  if (snap.fall || snap.diverged) {
    ctx.fillStyle = "#e06c75";
    ctx.font = "bold 14px system-ui, sans-serif";
    ctx.fillText(snap.diverged ? "DIVERGED" : "FALL", w / 2 - 30, 30);
  }
}

export function drawGauge(el: HTMLElement, value: number, fullScale: number): void {
  const frac = Math.max(-1, Math.min(1, value / fullScale));
  const bar = el.querySelector(".bar") as HTMLElement | null;
  const label = el.querySelector(".value") as HTMLElement | null;
  if (bar) {
    const pct = Math.abs(frac) * 50;
    bar.style.width = `${pct}%`;
    bar.style.left = frac >= 0 ? "50%" : `${50 - pct}%`;
    bar.style.background = frac >= 0 ? "#61d0a8" : "#e06c75";
  }
  if (label) label.textContent = `${value.toFixed(1)} N`;
}
