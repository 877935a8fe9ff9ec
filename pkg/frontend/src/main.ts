// Cockpit entry point: wires the socket, view model, controls, and charts.
// Keyboard: arrows = lean, +/- = tempo, space = kick, S = stop.

import { CommandThrottle } from "./commander.js";
import { drawGauge, drawPhasePortrait, drawSideView, drawStripChart } from "./charts.js";
import { CockpitViewModel } from "./model.js";
import { defaultSessionUrl, SessionSocket } from "./net.js";

const vm = new CockpitViewModel();

const socket = new SessionSocket(defaultSessionUrl(), {
  onMessage: (msg) => vm.ingest(msg),
  onStatus: (s) => vm.setConnection(s),
});
const commander = new CommandThrottle((cmd) => {
  socket.send(cmd);
});

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const leanSlider = el<HTMLInputElement>("lean");
const leanReadout = el<HTMLElement>("lean-readout");
const tempoReadout = el<HTMLElement>("tempo-readout");
const banner = el<HTMLElement>("banner");
const statusLine = el<HTMLElement>("status");
const errorLine = el<HTMLElement>("errors");

let tempo = 0.0;
const TEMPO_STEP = 0.25;

function setLean(v: number): void {
  const lean = Math.max(-1, Math.min(1, v));
  leanSlider.value = String(lean);
  leanReadout.textContent = lean.toFixed(2);
  commander.setLean(lean);
}

function setTempo(v: number): void {
  tempo = Math.max(0, Math.min(4, v));
  tempoReadout.textContent = `${tempo.toFixed(2)} steps/s`;
  commander.setTempo(tempo);
}

leanSlider.addEventListener("input", () => setLean(Number(leanSlider.value)));
el("tempo-up").addEventListener("click", () => setTempo(tempo + TEMPO_STEP));
el("tempo-down").addEventListener("click", () => setTempo(tempo - TEMPO_STEP));
el("kick").addEventListener("click", () => commander.kick(30, 0.3));
el("stop").addEventListener("click", () => {
  setLean(0);
  commander.stagedStop();
});
el("start").addEventListener("click", () => commander.session("start"));
el("pause").addEventListener("click", () => commander.session("pause"));
el("reset").addEventListener("click", () => {
  vm.clearSeries();
  commander.session("reset");
});

document.addEventListener("keydown", (ev) => {
  if (ev.target instanceof HTMLInputElement) return;
  switch (ev.key) {
    case "ArrowUp":
      setLean(Number(leanSlider.value) + 0.05);
      ev.preventDefault();
      break;
    case "ArrowDown":
      setLean(Number(leanSlider.value) - 0.05);
      ev.preventDefault();
      break;
    case "+":
    case "=":
      setTempo(tempo + TEMPO_STEP);
      break;
    case "-":
      setTempo(tempo - TEMPO_STEP);
      break;
    case " ":
      commander.kick(30, 0.3);
      ev.preventDefault();
      break;
    case "s":
    case "S":
      setLean(0);
      commander.stagedStop();
      break;
  }
});

interface Panel {
  canvas: HTMLCanvasElement;
  ctx: CanvasRenderingContext2D;
}

function panel(id: string): Panel {
  const canvas = el<HTMLCanvasElement>(id);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error(`no 2d context for #${id}`);
  return { canvas, ctx };
}

const side = panel("side-view");
const strip = panel("strip-chart");
const portrait = panel("phase-portrait");

function fitCanvas(p: Panel): void {
  const rect = p.canvas.getBoundingClientRect();
  if (p.canvas.width !== rect.width || p.canvas.height !== rect.height) {
    p.canvas.width = rect.width;
    p.canvas.height = rect.height;
  }
}

function render(): void {
  for (const p of [side, strip, portrait]) fitCanvas(p);
  drawSideView(side.ctx, side.canvas.width, side.canvas.height, vm.latest);
  drawStripChart(
    strip.ctx,
    strip.canvas.width,
    strip.canvas.height,
    [
      { data: vm.refDcm, color: "#5a6d91", label: "reference DCM / h" },
      { data: vm.robotDcm, color: "#61d0a8", label: "robot DCM / h" },
    ],
    10,
  );
  drawPhasePortrait(
    portrait.ctx,
    portrait.canvas.width,
    portrait.canvas.height,
    vm.portraitX,
    vm.portraitV,
  );
  const snap = vm.latest;
  drawGauge(el("gauge-hmi"), snap?.forces.f_hmi_n ?? 0, 150);
  drawGauge(el("gauge-spring"), snap?.forces.f_s_n ?? 0, 100);
  drawGauge(el("gauge-ext"), snap?.forces.f_ext_n ?? 0, 50);

  banner.hidden = vm.connection === "open";
  banner.textContent =
    vm.connection === "connecting" ? "connecting…" : "disconnected — retrying";
  const rtf = snap?.realtime_factor;
  statusLine.textContent =
    `session ${vm.sessionState()}` +
    ` · t=${(snap?.time_s ?? 0).toFixed(2)} s` +
    ` · sync err ${vm.synchronyError().toFixed(3)}` +
    (rtf ? ` · ${rtf.toFixed(2)}x realtime` : "") +
    (snap?.last_step ? ` · last step ${snap.last_step.length_m.toFixed(3)} m` : "");
  errorLine.textContent = vm.errors.length ? `server: ${vm.errors[vm.errors.length - 1]}` : "";
  requestAnimationFrame(render);
}

socket.connect();
requestAnimationFrame(render);
