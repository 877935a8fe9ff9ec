"""Live simulation session: a real-time loop plus a command mailbox.

One thread owns all simulation state and is the only thing that touches it;
network workers communicate with it through a bounded command queue (in) and
a latest-value snapshot cell (out), so a tick never blocks on I/O. Wall-clock
pacing targets the configured tick rate; a host that cannot sustain it slips
wall time while sim determinism is preserved, and the measured real-time
factor is reported in every snapshot.
"""

from __future__ import annotations

import enum
import json
import queue
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..config import ScenarioConfig
from ..engine import RunResult, Simulation, save_outputs, summarize_run
from ..lip import dcm
from .wire import (
    AckReply,
    ErrorReply,
    SessionControlMsg,
    SnapshotForces,
    SnapshotPilot,
    SnapshotReference,
    SnapshotRobot,
    SnapshotStep,
    WireStateSnapshot,
    parse_command,
)

__all__ = ["SessionState", "LiveSession"]


class SessionState(str, enum.Enum):
    IDLE = "idle"
    RUNNING = "running"
    PAUSED = "paused"
    ENDED = "ended"


@dataclass
class _QueuedCommand:
    payload: dict


class LiveSession:
    """State machine Idle -> Running <-> Paused -> Ended, reset -> Idle."""

    def __init__(
        self,
        template: ScenarioConfig,
        realtime: bool = True,
        outdir: str | Path | None = None,
        command_queue_size: int = 256,
    ) -> None:
        self.template = template
        self.realtime = realtime
        self.outdir = Path(outdir) if outdir else None
        self._state = SessionState.IDLE
        self._lock = threading.Lock()
        self._queue: queue.Queue[_QueuedCommand] = queue.Queue(maxsize=command_queue_size)
        self._thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._pause = threading.Event()
        self._latest_json: str | None = None
        self._rtf: float | None = None
        self._last_step_event: dict | None = None
        self.result: RunResult | None = None
        self.output_paths: dict[str, Path] = {}

    # ------------------------------------------------------------------ #
    # command handling (called from network workers)

    @property
    def state(self) -> SessionState:
        return self._state

    def handle_text(self, text: str) -> str:
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            return ErrorReply(reason=f"malformed JSON: {exc}").model_dump_json()
        return self.handle_payload(payload).model_dump_json()

    def handle_payload(self, payload) -> AckReply | ErrorReply:
        try:
            cmd = parse_command(payload)
        except Exception as exc:
            return ErrorReply(reason=f"invalid command: {exc}")
        if isinstance(cmd, SessionControlMsg):
            return self._handle_control(cmd)
        if self._state is not SessionState.RUNNING:
            return ErrorReply(
                reason=f"session is {self._state.value}; {cmd.type} commands need a running session"
            )
        try:
            self._queue.put_nowait(
                _QueuedCommand(payload=cmd.model_dump(exclude_none=True))
            )
        except queue.Full:
            return ErrorReply(reason="command queue full")
        return AckReply(detail=f"{cmd.type} queued")

    def _handle_control(self, cmd: SessionControlMsg) -> AckReply | ErrorReply:
        with self._lock:
            if cmd.action == "start":
                if self._state is SessionState.IDLE:
                    self._start_locked()
                    return AckReply(detail="session started")
                if self._state is SessionState.PAUSED:
                    self._pause.clear()
                    self._state = SessionState.RUNNING
                    return AckReply(detail="session resumed")
                return ErrorReply(reason=f"cannot start from {self._state.value}")
            if cmd.action == "pause":
                if self._state is SessionState.RUNNING:
                    self._pause.set()
                    self._state = SessionState.PAUSED
                    return AckReply(detail="session paused")
                return ErrorReply(reason=f"cannot pause from {self._state.value}")
            if cmd.action == "reset":
                if self._state is SessionState.IDLE:
                    return AckReply(detail="already idle")
                self._stop_locked()
                self._state = SessionState.IDLE
                self._latest_json = None
                self._last_step_event = None
                return AckReply(detail="session reset")
        return ErrorReply(reason=f"unknown action {cmd.action!r}")

    def _start_locked(self) -> None:
        self._stop.clear()
        self._pause.clear()
        self._state = SessionState.RUNNING
        self._thread = threading.Thread(target=self._loop, name="telewalk-session", daemon=True)
        self._thread.start()

    def _stop_locked(self) -> None:
        self._stop.set()
        self._pause.clear()
        thread = self._thread
        if thread is not None and thread.is_alive():
            thread.join(timeout=5.0)
        self._thread = None

    def close(self) -> None:
        with self._lock:
            self._stop_locked()
            if self._state is not SessionState.ENDED:
                self._state = SessionState.IDLE

    # ------------------------------------------------------------------ #
    # simulation loop (single owner of sim state)

    def _loop(self) -> None:
        sim = Simulation(self.template)
        dt = sim.dt
        batch = max(1, int(round(0.005 / dt)))
        tick_times: list[float] = []
        wall_start = time.perf_counter()
        next_deadline = wall_start
        window_ticks = 0
        window_start = wall_start

        self._publish(sim)
        while not self._stop.is_set() and not sim.finished:
            if self._pause.is_set():
                self._publish(sim)
                time.sleep(0.02)
                next_deadline = time.perf_counter()
                window_start = time.perf_counter()
                window_ticks = 0
                continue

            while True:
                try:
                    item = self._queue.get_nowait()
                except queue.Empty:
                    break
                sim.schedule_command(item.payload)

            n = min(batch, sim.n_ticks - sim.tick_index)
            t0 = time.perf_counter()
            for _ in range(n):
                sim.tick()
                if sim.finished:
                    break
            elapsed = time.perf_counter() - t0
            if n > 0:
                tick_times.extend([elapsed / n] * n)
            window_ticks += n

            now = time.perf_counter()
            if now - window_start >= 0.5:
                self._rtf = window_ticks * dt / (now - window_start)
                window_start = now
                window_ticks = 0
            self._publish(sim)

            if self.realtime:
                next_deadline += n * dt
                delay = next_deadline - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
                else:
                    # host too slow: slip wall time, keep determinism
                    next_deadline = time.perf_counter()

        sim.finalize()
        wall = time.perf_counter() - wall_start
        summary = summarize_run(sim, tick_times, wall)
        self.result = RunResult(
            trace=sim.trace, summary=summary, command_log=sim.command_log
        )
        if self.outdir is not None and not self._stop.is_set():
            self.output_paths = save_outputs(self.result, self.outdir)
        if not self._stop.is_set():
            self._state = SessionState.ENDED
        self._publish(sim)

    # ------------------------------------------------------------------ #
    # snapshots

    def _publish(self, sim: Simulation) -> None:
        for event in reversed(sim.trace.events):
            if event.get("type") == "step":
                self._last_step_event = event
                break
        snap = self._snapshot(sim)
        self._latest_json = snap.model_dump_json()

    def _snapshot(self, sim: Simulation) -> WireStateSnapshot:
        ref = sim.refgen.state
        obs = sim.last_obs
        last_step = None
        if self._last_step_event is not None:
            e = self._last_step_event
            last_step = SnapshotStep(
                t=e["t"],
                kind=e["kind"],
                length_m=e.get("ell", e.get("landing_dx", 0.0)),
                stance=e.get("stance", ""),
            )
        xi_r = dcm(sim.robot.sagittal, sim.params_r)
        return WireStateSnapshot(
            session_state=self._state.value,
            tick=sim.tick_index,
            time_s=sim.tick_index * sim.dt,
            realtime_factor=self._rtf,
            robot=SnapshotRobot(
                world_x_m=sim.robot.world_x,
                y_m=sim.robot.frontal.x,
                xdot_mps=sim.robot.sagittal.xdot,
                ydot_mps=sim.robot.frontal.xdot,
                stance_foot_world_x_m=sim.robot.stance_foot_world_x,
                phase=sim.robot.phase.value,
                phase_time_s=sim.robot.phase_time,
                stance_side=sim.feet.stance_side.value,
            ),
            reference=SnapshotReference(
                x_m=ref.x,
                xdot_mps=ref.xdot,
                xi_m=ref.xi,
                xi_norm=ref.xi / sim.params_h.com_height,
                elongated=ref.elongated,
            ),
            pilot=SnapshotPilot(
                com_x_m=obs.com_x if obs else 0.0,
                com_y_m=obs.com_y if obs else 0.0,
                contact_left=bool(obs.contact_left) if obs else True,
                contact_right=bool(obs.contact_right) if obs else True,
            ),
            forces=SnapshotForces(
                f_hmi_n=sim.last_forces.f_hmi,
                f_s_n=sim.last_forces.f_s,
                f_ext_n=sim.last_forces.f_ext,
                f_ff_n=sim.last_forces.f_ff,
                f_fb_n=sim.last_forces.f_fb,
            ),
            xi_r_norm=xi_r / sim.params_r.com_height,
            last_step=last_step,
            fall=sim.fall,
            diverged=sim.diverged,
        )

    def latest_json(self) -> str | None:
        return self._latest_json
