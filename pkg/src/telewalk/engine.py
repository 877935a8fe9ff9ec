"""Deterministic fixed-step simulation orchestrator.

Each tick wires pilot -> walking reference -> force coupling -> support
state machine / step planner -> robot plant -> pilot plant, in that order,
and appends one trace row. Identical configurations (including the seed)
produce byte-identical traces: the loop never reads the wall clock, never
iterates over unordered containers, and does all arithmetic in float64.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import DisturbanceWindow, ScenarioConfig
from .coupling import (
    CouplingGains,
    ForceSet,
    FrontalOrbitTarget,
    feedback_force,
    feedforward_force,
    hmi_force,
    reference_contact_force,
    virtual_spring_force,
)
from .lip import PlanarState, contact_force, dcm
from .pilots import (
    ExternalPilot,
    LeanWalkPilot,
    PeriodicStepperPilot,
    PilotCommand,
    PilotFeedback,
    ReactiveBalancePilot,
    TraceReplayPilot,
)
from .reference import ReferenceGenerator, pilot_dcm_surrogate
from .robot import (
    FeetState,
    FootGeometry,
    GaitFsm,
    Phase,
    RobotState,
    Side,
    StepEvent,
    apply_reset,
    cop_bounds,
    force_to_cop,
    integrate_tick,
    saturate_cop,
    swing_foot_target,
)
from .stepping import StepPlanInput, closed_loop_step_length
from .trace import COLUMNS, SimTrace, pilot_observations_from_trace

__all__ = [
    "RunSummary",
    "RunResult",
    "Simulation",
    "run_scenario",
    "inject_disturbance",
    "compute_metrics",
    "save_outputs",
]

SUMMARY_SCHEMA = 1


@dataclass
class RunSummary:
    name: str
    duration_s: float
    ticks: int
    distance_m: float
    step_count: int
    top_speed_mps: float
    mean_abs_speed_mps: float
    rms_dcm_error: float
    resync_steps: list[int | None]
    fall: bool
    diverged: bool
    diverged_tick: int | None = None
    mean_tick_seconds: float | None = None
    max_tick_seconds: float | None = None
    realtime_factor: float | None = None
    degraded_tracking: bool = False
    schema_version: int = SUMMARY_SCHEMA

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "duration_s": self.duration_s,
            "ticks": self.ticks,
            "distance_m": self.distance_m,
            "step_count": self.step_count,
            "top_speed_mps": self.top_speed_mps,
            "mean_abs_speed_mps": self.mean_abs_speed_mps,
            "rms_dcm_error": self.rms_dcm_error,
            "resync_steps": self.resync_steps,
            "fall": self.fall,
            "diverged": self.diverged,
            "diverged_tick": self.diverged_tick,
            "mean_tick_seconds": self.mean_tick_seconds,
            "max_tick_seconds": self.max_tick_seconds,
            "realtime_factor": self.realtime_factor,
            "degraded_tracking": self.degraded_tracking,
        }


@dataclass
class RunResult:
    trace: SimTrace
    summary: RunSummary
    command_log: list[dict] = field(default_factory=list)


def inject_disturbance(schedule: list[DisturbanceWindow], t: float) -> float:
    """Sum of active scheduled pushes at time t; zero outside every window."""
    total = 0.0
    for w in schedule:
        if w.start_s <= t < w.start_s + w.duration_s:
            if w.profile == "boxcar":
                total += w.force_n
            else:
                # trapezoid with 20% rise/fall edges
                edge = 0.2 * w.duration_s
                rel = t - w.start_s
                scale = min(1.0, rel / edge if edge > 0 else 1.0,
                            (w.duration_s - rel) / edge if edge > 0 else 1.0)
                total += w.force_n * max(scale, 0.0)
    return total


def _build_pilot(cfg: ScenarioConfig):
    p = cfg.pilot
    params_h = cfg.human.to_params()
    if p.kind == "periodic":
        return PeriodicStepperPilot(
            params_h,
            tempo=p.tempo_hz,
            half_width=p.lateral_half_width_m,
            dsp_fraction=p.dsp_fraction,
            start_time=p.start_s,
            timing_jitter_std=p.timing_jitter_std_s,
            com_jitter_std=p.com_jitter_std_m,
            seed=cfg.seed,
        )
    if p.kind == "lean_walk":
        return LeanWalkPilot(
            params_h,
            tempo=p.tempo_hz,
            lean=p.lean_m,
            ramp_start=p.ramp_start_s,
            ramp_time=p.ramp_time_s,
            hold_time=p.hold_time_s,
            stop_time=p.stop_s,
            start_time=p.start_s,
            half_width=p.lateral_half_width_m,
            dsp_fraction=p.dsp_fraction,
            kp=p.kp,
            kd=p.kd,
            spring_comp=p.spring_comp,
            workspace_limit=p.workspace_limit_m,
        )
    if p.kind == "reactive":
        return ReactiveBalancePilot(
            params_h,
            tempo=p.tempo_hz,
            half_width=p.lateral_half_width_m,
            dsp_fraction=p.dsp_fraction,
            start_time=p.start_s,
            kp=p.kp,
            kd=p.kd,
            reflex_threshold=p.reflex_threshold_n,
            refractory=p.refractory_s,
            workspace_limit=p.workspace_limit_m,
        )
    if p.kind == "external":
        return ExternalPilot(
            params_h,
            lean_scale=p.lean_scale_m,
            tempo=p.tempo_hz,
            half_width=p.lateral_half_width_m,
            dsp_fraction=p.dsp_fraction,
            kp=p.kp,
            kd=p.kd,
            workspace_limit=p.workspace_limit_m,
        )
    if p.kind == "trace":
        source = SimTrace.read_csv(p.path)
        return TraceReplayPilot(pilot_observations_from_trace(source))
    raise ValueError(f"unknown pilot kind {p.kind!r}")


class Simulation:
    """Tick-by-tick simulation; batch runs and live sessions share it."""

    def __init__(self, cfg: ScenarioConfig) -> None:
        self.cfg = cfg
        self.params_h = cfg.human.to_params()
        self.params_r = cfg.robot.to_params()
        self.h_ratio = self.params_r.com_height / self.params_h.com_height
        self.gains = CouplingGains(
            k_x=cfg.gains.k_x,
            k_y=cfg.gains.k_y,
            disturbance_reflection=cfg.gains.disturbance_reflection,
        )
        self.geometry = FootGeometry(cfg.robot.foot_length_m, cfg.robot.foot_width_m)
        self.dt = cfg.dt_s
        self.n_ticks = int(round(cfg.duration_s / cfg.dt_s))

        self.pilot = _build_pilot(cfg)
        self.refgen = ReferenceGenerator(self.params_h, cfg.reference.to_config())
        self.fsm = GaitFsm(min_dsp_dwell=cfg.t_dsp_s)
        self.feet = FeetState()
        self.robot = RobotState(
            sagittal=PlanarState(0.0, 0.0), frontal=PlanarState(0.0, 0.0)
        )
        self.frontal_target = FrontalOrbitTarget(self.params_r)
        self.trace = SimTrace()
        self.command_log: list[dict] = []

        self.tick_index = 0
        self.step_count = 0
        self.last_obs = None
        self.fall = False
        self.diverged = False
        self.diverged_tick: int | None = None
        self.last_forces = ForceSet()

        self._live_disturbances: list[DisturbanceWindow] = list(cfg.disturbances)
        self._queued_commands: dict[int, list[dict]] = {}
        self._prev_contacts: tuple[bool, bool] | None = None
        self._last_touchdown_t = 0.0
        self._swing_dx_preview = 0.0
        self._swing_y_preview = 0.0
        self._sat_streak = [0, 0]
        self._sat_state = [False, False]
        self._dist_active = False
        self._finalized = False

        if cfg.pilot.kind == "external" and cfg.pilot.command_log:
            for entry in _read_command_log(cfg.pilot.command_log):
                self.schedule_command(entry["command"], entry["tick"])

    # ------------------------------------------------------------------ #
    # live command interface

    def schedule_command(self, payload: dict, tick: int | None = None) -> int:
        """Queue a command for a tick boundary (default: the next tick)."""
        at = self.tick_index if tick is None else tick
        self._queued_commands.setdefault(at, []).append(payload)
        return at

    def _apply_command(self, payload: dict, t: float) -> None:
        kind = payload.get("type")
        if kind == "pilot":
            if isinstance(self.pilot, ExternalPilot):
                self.pilot.apply_command(
                    PilotCommand(
                        lean=payload.get("lean"),
                        tempo=payload.get("tempo"),
                        stop=payload.get("stop"),
                    )
                )
            record = payload
        elif kind == "disturb":
            window = DisturbanceWindow(
                start_s=t,
                duration_s=float(payload["duration_s"]),
                force_n=float(payload["force_n"]),
            )
            self._live_disturbances.append(window)
            record = payload
        else:
            raise ValueError(f"unknown command type {kind!r}")
        entry = {"tick": self.tick_index, "command": record}
        self.command_log.append(entry)
        self.trace.add_event({"type": "command", "t": t, **entry})

    # ------------------------------------------------------------------ #
    # core loop

    @property
    def finished(self) -> bool:
        return self.diverged or self.tick_index >= self.n_ticks

    def _frontal_anchor_update(self, obs, t: float, step_time: float) -> None:
        contacts = (obs.contact_left, obs.contact_right)
        prev = self._prev_contacts
        if prev is not None:
            touched = [now and not was for was, now in zip(prev, contacts)]
            lifted = [was and not now for was, now in zip(prev, contacts)]
            foot_y = (obs.foot_y_left, obs.foot_y_right)
            for i, did in enumerate(touched):
                if did:
                    self.frontal_target.anchor(foot_y[i] * self.h_ratio, step_time, t)
                    self._last_touchdown_t = t
            if self.frontal_target.decaying and (lifted[0] or lifted[1]):
                support = 1 if lifted[0] else 0
                if contacts[support]:
                    self.frontal_target.anchor(
                        foot_y[support] * self.h_ratio, step_time, t
                    )
                    self._last_touchdown_t = t
        if (
            not self.frontal_target.decaying
            and contacts[0]
            and contacts[1]
            and t - self._last_touchdown_t > 1.5 * step_time
        ):
            self.frontal_target.start_decay(t)
        self._prev_contacts = contacts

    def _compute_stage(self, t: float) -> dict:
        """Stages 1-3: observation, reference, forces, CoP realization."""
        obs = self.pilot.observe(t)
        self.last_obs = obs
        if self.tick_index == 0 and not self.trace.rows:
            self.feet.foot_y[Side.LEFT] = obs.foot_y_left * self.h_ratio
            self.feet.foot_y[Side.RIGHT] = obs.foot_y_right * self.h_ratio

        ref = self.refgen.update(obs, t)
        boundary = self.refgen.boundary
        self._frontal_anchor_update(obs, t, boundary.step_time)

        f_ext = inject_disturbance(self._live_disturbances, t)
        f_ref = reference_contact_force(ref, self.params_h)
        f_ff = feedforward_force(f_ref, self.params_h, self.params_r)
        xi_r = dcm(self.robot.sagittal, self.params_r)
        f_fb = feedback_force(ref.xi, xi_r, self.params_h, self.params_r, self.gains)
        f_hmi = hmi_force(
            self.robot.sagittal.xdot,
            ref.xdot,
            f_ext,
            self.params_h,
            self.params_r,
            self.gains.disturbance_reflection,
        )
        f_s = virtual_spring_force(boundary.x_plus, self.params_h)
        xi_ry = dcm(self.robot.frontal, self.params_r)
        f_fb_y = self.gains.k_y * (
            (self.frontal_target.xi_target(t) - xi_ry) / self.params_r.com_height
        )
        return {
            "obs": obs,
            "ref": ref,
            "boundary": boundary,
            "f_ext": f_ext,
            "f_ref": f_ref,
            "f_ff": f_ff,
            "f_fb": f_fb,
            "f_hmi": f_hmi,
            "f_s": f_s,
            "f_fb_y": f_fb_y,
        }

    def _realize_cop(self, stage: dict) -> dict:
        bounds = cop_bounds(self.fsm.phase, self.feet, self.geometry)
        p_x_cmd = force_to_cop(
            stage["f_ff"] + stage["f_fb"], self.robot.sagittal, self.params_r
        )
        p_y_cmd = (
            stage["obs"].cop_y * self.h_ratio
            - stage["f_fb_y"] / (self.params_r.mass * self.params_r.omega_sq)
        )
        cop, sat = saturate_cop((p_x_cmd, p_y_cmd), bounds)
        return {
            "bounds": bounds,
            "cop_cmd": (p_x_cmd, p_y_cmd),
            "cop": cop,
            "sat": sat,
            "f_contact_x": contact_force(self.robot.sagittal, cop[0], self.params_r),
            "f_contact_y": contact_force(self.robot.frontal, cop[1], self.params_r),
        }

    def tick(self) -> None:
        if self.finished:
            return
        t = self.tick_index * self.dt

        for payload in self._queued_commands.pop(self.tick_index, ()):
            self._apply_command(payload, t)

        stage = self._compute_stage(t)
        obs, boundary = stage["obs"], stage["boundary"]

        event_name = ""
        event_info = {
            "step_length_m": 0.0,
            "xi_r_minus_m": 0.0,
            "xi_ref_plus_used_m": 0.0,
            "planner_clamped": 0,
        }
        transition = self.fsm.update(obs.contact_left, obs.contact_right)
        if transition == "s_to_d":
            swing = self.feet.stance_side.other
            self.feet.front_dx = self._swing_dx_preview
            self.feet.foot_y[swing] = self._swing_y_preview
            event_name = "s_to_d"
            event_info["step_length_m"] = self._swing_dx_preview
            self.trace.add_event(
                {
                    "type": "step",
                    "kind": "s_to_d",
                    "t": t,
                    "landing_dx": self._swing_dx_preview,
                    "stance": self.feet.stance_side.value,
                }
            )
        elif transition == "d_to_s":
            xi_live = dcm(self.robot.sagittal, self.params_r)
            plan = closed_loop_step_length(
                StepPlanInput(
                    xi_robot=xi_live,
                    xdot_robot=self.robot.sagittal.xdot,
                    xi_ref_plus=boundary.xi_plus,
                    height_ratio=self.h_ratio,
                    t_dsp=self.cfg.t_dsp_s,
                    max_length=self.cfg.robot.max_step_length_m,
                )
            )
            apply_reset(self.robot, plan.length)
            self.feet.stance_side = self.fsm.stance_side
            self.feet.behind_dx = -plan.length
            self.feet.front_dx = None
            self.refgen.notify_step(t)
            self.step_count += 1
            event_name = "d_to_s"
            event_info.update(
                step_length_m=plan.length,
                xi_r_minus_m=xi_live,
                xi_ref_plus_used_m=boundary.xi_plus,
                planner_clamped=int(plan.clamped),
            )
            event = StepEvent(
                kind="d_to_s",
                step_length=plan.length,
                timestamp=t,
                stance_side=self.fsm.stance_side,
                xi_robot_minus=xi_live,
                xi_robot_plus=dcm(self.robot.sagittal, self.params_r),
                xi_ref_plus=boundary.xi_plus,
                xdot_robot=self.robot.sagittal.xdot,
                clamped=plan.clamped,
            )
            self.trace.add_event(
                {
                    "type": "step",
                    "kind": "d_to_s",
                    "t": t,
                    "ell": event.step_length,
                    "raw_ell": plan.raw_length,
                    "xi_r_minus": event.xi_robot_minus,
                    "xi_r_plus": event.xi_robot_plus,
                    "xi_ref_plus": event.xi_ref_plus,
                    "xdot_r": event.xdot_robot,
                    "clamped": event.clamped,
                    "stance": event.stance_side.value,
                }
            )
            if plan.clamped:
                self.trace.add_event(
                    {
                        "type": "planner_clamp",
                        "t": t,
                        "raw": plan.raw_length,
                        "clamped": plan.length,
                    }
                )
        self.robot.phase = self.fsm.phase
        self.robot.phase_time = self.fsm.phase_time

        real = self._realize_cop(stage)

        if self.fsm.phase is not Phase.DSP:
            xi_live = dcm(self.robot.sagittal, self.params_r)
            preview = closed_loop_step_length(
                StepPlanInput(
                    xi_robot=xi_live,
                    xdot_robot=self.robot.sagittal.xdot,
                    xi_ref_plus=boundary.xi_plus,
                    height_ratio=self.h_ratio,
                    t_dsp=self.cfg.t_dsp_s,
                    max_length=self.cfg.robot.max_step_length_m,
                )
            )
            swing = self.feet.stance_side.other
            pilot_swing_y = (
                obs.foot_y_left if swing is Side.LEFT else obs.foot_y_right
            )
            self._swing_dx_preview, self._swing_y_preview = swing_foot_target(
                pilot_swing_y,
                preview.length,
                self.fsm.phase_time,
                boundary.step_time,
                self.feet.behind_dx,
                self.h_ratio,
            )

        self._update_saturation(real["sat"], t)
        self._update_disturbance_events(stage["f_ext"], t)
        self.last_forces = ForceSet(
            f_ff=stage["f_ff"],
            f_fb=stage["f_fb"],
            f_hmi=stage["f_hmi"],
            f_s=stage["f_s"],
            f_ext=stage["f_ext"],
            f_ref=stage["f_ref"],
            f_fb_y=stage["f_fb_y"],
            f_contact_x=real["f_contact_x"],
            f_contact_y=real["f_contact_y"],
        )
        self._append_row(t, stage, real, event_name, event_info)

        integrate_tick(self.robot, real["cop"], stage["f_ext"], self.dt, self.params_r)
        self.fsm.advance_time(self.dt)
        self.pilot.advance(
            t, self.dt, PilotFeedback(f_hmi=stage["f_hmi"], f_s=stage["f_s"])
        )

        self.tick_index += 1
        self._check_divergence()

    def finalize(self) -> None:
        """Append the terminal row (state at t = duration, controls unapplied)."""
        if self._finalized or self.diverged:
            self._finalized = True
            return
        t = self.tick_index * self.dt
        stage = self._compute_stage(t)
        real = self._realize_cop(stage)
        self._append_row(
            t,
            stage,
            real,
            "",
            {
                "step_length_m": 0.0,
                "xi_r_minus_m": 0.0,
                "xi_ref_plus_used_m": 0.0,
                "planner_clamped": 0,
            },
        )
        self._finalized = True

    def run(self) -> None:
        while not self.finished:
            self.tick()
        self.finalize()

    # ------------------------------------------------------------------ #
    # bookkeeping

    def _update_saturation(self, sat: tuple[bool, bool], t: float) -> None:
        window_ticks = int(round(self.cfg.fall_cop_saturation_s / self.dt))
        for axis, hit in enumerate(sat):
            self._sat_streak[axis] = self._sat_streak[axis] + 1 if hit else 0
            if hit != self._sat_state[axis]:
                self._sat_state[axis] = hit
                self.trace.add_event(
                    {
                        "type": "saturation",
                        "axis": "xy"[axis],
                        "state": "on" if hit else "off",
                        "t": t,
                    }
                )
            if not self.fall and self._sat_streak[axis] > window_ticks:
                self.fall = True
                self.trace.add_event({"type": "fall", "axis": "xy"[axis], "t": t})

    def _update_disturbance_events(self, f_ext: float, t: float) -> None:
        active = f_ext != 0.0
        if active != self._dist_active:
            self._dist_active = active
            self.trace.add_event(
                {
                    "type": "disturbance",
                    "state": "on" if active else "off",
                    "t": t,
                    "force": f_ext,
                }
            )

    def _check_divergence(self) -> None:
        limit = self.cfg.divergence_limit_m
        vals = (
            self.robot.sagittal.x,
            self.robot.sagittal.xdot,
            self.robot.frontal.x,
            self.robot.frontal.xdot,
        )
        bad = any(not math.isfinite(v) for v in vals) or abs(
            self.robot.sagittal.x
        ) > limit or abs(self.robot.frontal.x) > limit
        if bad:
            self.diverged = True
            self.diverged_tick = self.tick_index
            self.trace.add_event(
                {"type": "divergence", "tick": self.tick_index, "t": self.tick_index * self.dt}
            )

    def _append_row(self, t, stage, real, event_name, event_info) -> None:
        obs, ref, boundary = stage["obs"], stage["ref"], stage["boundary"]
        xi_r = dcm(self.robot.sagittal, self.params_r)
        front_dx = self.feet.front_dx if self.feet.front_dx is not None else 0.0
        self.trace.append(
            {
                "time_s": t,
                "tick": self.tick_index,
                "phase": self.robot.phase.value,
                "phase_time_s": self.robot.phase_time,
                "stance_side": self.feet.stance_side.value,
                "stance_foot_world_x_m": self.robot.stance_foot_world_x,
                "front_foot_dx_m": front_dx,
                "pilot_foot_left_y_m": obs.foot_y_left,
                "pilot_foot_right_y_m": obs.foot_y_right,
                "x_r_m": self.robot.sagittal.x,
                "xdot_r_mps": self.robot.sagittal.xdot,
                "y_r_m": self.robot.frontal.x,
                "ydot_r_mps": self.robot.frontal.xdot,
                "world_x_m": self.robot.world_x,
                "xi_r_m": xi_r,
                "xi_r_norm": xi_r / self.params_r.com_height,
                "ref_x_m": ref.x,
                "ref_xdot_mps": ref.xdot,
                "ref_xi_m": ref.xi,
                "ref_xi_norm": ref.xi / self.params_h.com_height,
                "ref_xi_plus_m": boundary.xi_plus,
                "ref_step_time_s": boundary.step_time,
                "ref_phase_time_s": ref.phase_time,
                "ref_elongated": int(ref.elongated),
                "pilot_com_x_m": obs.com_x,
                "pilot_com_xdot_mps": obs.com_xdot,
                "pilot_contact_left": int(obs.contact_left),
                "pilot_contact_right": int(obs.contact_right),
                "pilot_force_x_n": obs.contact_force_x,
                "pilot_com_y_m": obs.com_y,
                "pilot_com_ydot_mps": obs.com_ydot,
                "pilot_cop_y_m": obs.cop_y,
                "pilot_dcm_m": pilot_dcm_surrogate(obs, self.refgen.config),
                "f_ff_n": stage["f_ff"],
                "f_fb_n": stage["f_fb"],
                "f_hmi_n": stage["f_hmi"],
                "f_s_n": stage["f_s"],
                "f_ext_n": stage["f_ext"],
                "f_ref_n": stage["f_ref"],
                "f_fb_y_n": stage["f_fb_y"],
                "cop_x_cmd_m": real["cop_cmd"][0],
                "cop_y_cmd_m": real["cop_cmd"][1],
                "cop_x_m": real["cop"][0],
                "cop_y_m": real["cop"][1],
                "sat_x": int(real["sat"][0]),
                "sat_y": int(real["sat"][1]),
                "cop_x_lb_m": real["bounds"].x_lb,
                "cop_x_ub_m": real["bounds"].x_ub,
                "cop_y_lb_m": real["bounds"].y_lb,
                "cop_y_ub_m": real["bounds"].y_ub,
                "f_contact_x_n": real["f_contact_x"],
                "f_contact_y_n": real["f_contact_y"],
                "event": event_name,
                "step_length_m": event_info["step_length_m"],
                "xi_r_minus_m": event_info["xi_r_minus_m"],
                "xi_ref_plus_used_m": event_info["xi_ref_plus_used_m"],
                "planner_clamped": event_info["planner_clamped"],
                "fall": int(self.fall),
                "diverged": int(self.diverged),
            }
        )


def summarize_run(
    sim: Simulation, tick_times: list[float] | None = None, wall_seconds: float | None = None
) -> RunSummary:
    """Metrics for a finished simulation plus optional wall-clock stats."""
    summary = compute_metrics(
        sim.trace,
        sim.trace.events,
        synchrony_threshold=sim.cfg.synchrony_threshold,
        name=sim.cfg.name,
        duration_s=sim.cfg.duration_s,
    )
    summary.fall = sim.fall
    summary.diverged = sim.diverged
    summary.diverged_tick = sim.diverged_tick
    if tick_times:
        summary.mean_tick_seconds = sum(tick_times) / len(tick_times)
        summary.max_tick_seconds = max(tick_times)
        if wall_seconds and wall_seconds > 0:
            summary.realtime_factor = len(tick_times) * sim.cfg.dt_s / wall_seconds
    return summary


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """Run a scenario to completion and summarize it."""
    sim = Simulation(cfg)
    tick_times: list[float] = []
    wall_start = time.perf_counter()
    while not sim.finished:
        t0 = time.perf_counter()
        sim.tick()
        tick_times.append(time.perf_counter() - t0)
    sim.finalize()
    wall = time.perf_counter() - wall_start
    summary = summarize_run(sim, tick_times, wall)
    return RunResult(trace=sim.trace, summary=summary, command_log=sim.command_log)


def compute_metrics(
    trace: SimTrace,
    events: list[dict],
    synchrony_threshold: float = 0.05,
    name: str = "scenario",
    duration_s: float | None = None,
) -> RunSummary:
    """Deterministic run metrics from a trace and its event stream.

    Wall-clock statistics are not derivable from a trace (they never enter
    it, by the determinism contract) and are left unset here.
    """
    if not trace.rows:
        raise ValueError("empty trace")
    world_x = trace.column("world_x_m")
    xdot = trace.column("xdot_r_mps")
    err = [
        a - b
        for a, b in zip(trace.column("xi_r_norm"), trace.column("ref_xi_norm"))
    ]
    step_events = [e for e in events if e.get("type") == "step" and e.get("kind") == "d_to_s"]
    dist_off = [e["t"] for e in events if e.get("type") == "disturbance" and e.get("state") == "off"]
    times = trace.column("time_s")

    resync: list[int | None] = []
    for t_end in dist_off:
        steps_after = [e["t"] for e in step_events if e["t"] > t_end]
        found: int | None = None
        for i, t_step in enumerate(steps_after):
            t_next = steps_after[i + 1] if i + 1 < len(steps_after) else times[-1]
            seg = [
                e
                for e, tt in zip(err, times)
                if t_step <= tt < t_next
            ]
            if seg and math.sqrt(sum(v * v for v in seg) / len(seg)) < synchrony_threshold:
                found = i + 1
                break
        resync.append(found)

    fall = bool(trace.rows[-1][COLUMNS.index("fall")]) or any(
        e.get("type") == "fall" for e in events
    )
    diverged = bool(trace.rows[-1][COLUMNS.index("diverged")]) or any(
        e.get("type") == "divergence" for e in events
    )
    rms = math.sqrt(sum(v * v for v in err) / len(err))
    return RunSummary(
        name=name,
        duration_s=duration_s if duration_s is not None else times[-1],
        ticks=len(trace.rows) - 1,
        distance_m=world_x[-1] - world_x[0],
        step_count=len(step_events),
        top_speed_mps=max(abs(v) for v in xdot),
        mean_abs_speed_mps=sum(abs(v) for v in xdot) / len(xdot),
        rms_dcm_error=rms,
        resync_steps=resync,
        fall=fall,
        diverged=diverged,
        degraded_tracking=rms > synchrony_threshold,
    )


def _read_command_log(path: str | Path) -> list[dict]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def save_outputs(result: RunResult, outdir: str | Path) -> dict[str, Path]:
    """Write trace.csv, events.jsonl, commands.jsonl, summary.json."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "trace": out / "trace.csv",
        "events": out / "events.jsonl",
        "summary": out / "summary.json",
    }
    result.trace.write_csv(paths["trace"])
    result.trace.write_events(paths["events"])
    with open(paths["summary"], "w", encoding="utf-8") as fh:
        json.dump(result.summary.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.command_log:
        paths["commands"] = out / "commands.jsonl"
        with open(paths["commands"], "w", encoding="utf-8") as fh:
            for entry in result.command_log:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return paths
