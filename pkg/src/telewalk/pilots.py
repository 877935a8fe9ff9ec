"""Pilot observation sources.

A pilot is anything that produces one :class:`PilotObservation` per tick:
synthetic steppers driven by a point-mass plant, a trace-replay source, and
an externally commanded source fed by the cockpit. All of them share a
deterministic footfall scheduler that produces alternating contacts, a
cadence-consistent frontal CoM sway, and the pilot's frontal CoP.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .lip import LipParams
from .reference import PilotObservation
from .robot import Side, _rk4_plane

__all__ = [
    "PilotPlantState",
    "PilotCommand",
    "PilotFeedback",
    "pilot_plant_tick",
    "FootfallScheduler",
    "PeriodicStepperPilot",
    "LeanWalkPilot",
    "ReactiveBalancePilot",
    "ExternalPilot",
    "TraceReplayPilot",
]

_DECAY_RATE = 3.0  # 1/s, critically damped frontal recentering after a stop


@dataclass(frozen=True)
class PilotPlantState:
    x: float
    xdot: float


@dataclass(frozen=True)
class PilotCommand:
    """Latched cockpit intent; None fields leave the previous value alone."""

    lean: float | None = None   # -1..1, maps onto a CoM target
    tempo: float | None = None  # steps per second
    stop: bool | None = None


@dataclass(frozen=True)
class PilotFeedback:
    """Forces the simulator feeds back into the pilot each tick."""

    f_hmi: float = 0.0
    f_s: float = 0.0


def pilot_plant_tick(
    state: PilotPlantState,
    f_pilot: float,
    f_spring: float,
    f_hmi: float,
    dt: float,
    params: LipParams,
    workspace_limit: float = math.inf,
) -> PilotPlantState:
    """One tick of the pilot point mass: m*xddot = f_pilot - f_spring + f_hmi.

    Uses the same fixed-step integrator as the robot. The workspace is a hard
    wall: the position clamps and the velocity zeroes at the boundary.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    accel = (f_pilot - f_spring + f_hmi) / params.mass
    x, v = _rk4_plane(state.x, state.xdot, 0.0, 0.0, accel, dt)
    if x > workspace_limit:
        x, v = workspace_limit, 0.0
    elif x < -workspace_limit:
        x, v = -workspace_limit, 0.0
    return PilotPlantState(x, v)


class FootfallScheduler:
    """Deterministic alternating footfalls with a consistent frontal sway.

    Timeline per step: the swing foot lifts, swings for (1 - dsp_fraction) of
    the step period, lands, and both feet stay down for the rest of the
    period until the opposite foot lifts. The frontal CoM follows the exact
    piecewise pendulum orbit that alternating support at this cadence closes:
    at each touchdown the sway state re-anchors to (y=0, ydot toward the new
    support foot), which keeps the scripted pilot laterally periodic forever.
    """

    def __init__(
        self,
        params: LipParams,
        tempo: float,
        half_width: float = 0.05,
        dsp_fraction: float = 1.0 / 6.0,
        start_time: float = 0.3,
        timing_jitter_std: float = 0.0,
        rng: random.Random | None = None,
    ) -> None:
        if not 0.0 < dsp_fraction < 1.0:
            raise ValueError("dsp_fraction must be in (0, 1)")
        self._omega = params.omega
        self.half_width = half_width
        self.dsp_fraction = dsp_fraction
        self.tempo = max(tempo, 0.0)
        self._jitter_std = timing_jitter_std
        self._rng = rng or random.Random(0)

        self.foot_y = {Side.LEFT: half_width, Side.RIGHT: -half_width}
        self.contact = {Side.LEFT: True, Side.RIGHT: True}
        self._mode = "stand"  # stand | swing | dsp
        self._next_swing = Side.LEFT
        self._support = Side.RIGHT    # foot carrying the CoP
        self._next_lift = start_time if self.tempo > 0.0 else math.inf
        self._touchdown_time = math.inf
        self._stopping = False
        self._t = 0.0

        # frontal sway segment: pendulum arc about _fr_p since _fr_t0
        self._fr_mode = "decay"
        self._fr_y0 = 0.0
        self._fr_v0 = 0.0
        self._fr_p = 0.0
        self._fr_t0 = 0.0

    def _period(self) -> float:
        return 1.0 / self.tempo if self.tempo > 0.0 else math.inf

    def _jitter(self) -> float:
        if self._jitter_std <= 0.0:
            return 0.0
        return self._rng.gauss(0.0, self._jitter_std)

    def set_tempo(self, tempo: float, now: float) -> None:
        tempo = max(tempo, 0.0)
        resume = self._mode == "stand" and self.tempo <= 0.0 and tempo > 0.0
        self.tempo = tempo
        if tempo > 0.0:
            self._stopping = False
        if resume:
            self._next_lift = now + self.dsp_fraction * self._period()

    def request_stop(self) -> None:
        """Finish the current step, then stand."""
        self._stopping = True

    def reflex_step(self, now: float) -> None:
        """Slam the swing foot down now (or lift immediately if standing on both)."""
        if self._mode == "swing":
            self._touchdown_time = now
        elif self._mode == "dsp" and not self._stopping and self.tempo > 0.0:
            self._next_lift = now

    def _anchor_sway(self, support_y: float, t0: float, lead: float = 0.0) -> None:
        period = self._period()
        if not math.isfinite(period):
            return
        boundary_v = self._omega * support_y * math.tanh(0.5 * self._omega * period)
        self._fr_mode = "orbit"
        self._fr_y0 = 0.0
        self._fr_v0 = boundary_v
        self._fr_p = support_y
        self._fr_t0 = t0 - lead

    def _anchor_decay(self, t0: float) -> None:
        y, v = self.frontal_state(t0)
        self._fr_mode = "decay"
        self._fr_y0, self._fr_v0, self._fr_p, self._fr_t0 = y, v, 0.0, t0

    def step_to(self, t: float) -> None:
        """Process all footfall events due at or before t."""
        while True:
            if self._mode == "swing" and t >= self._touchdown_time:
                when = self._touchdown_time
                landed = self._next_swing
                self.contact[landed] = True
                self._support = landed
                self._next_swing = landed.other
                self._mode = "dsp"
                self._anchor_sway(self.foot_y[landed], when)
                if self._stopping or self.tempo <= 0.0:
                    self._mode = "stand"
                    self._next_lift = math.inf
                    self._support = landed
                    self._anchor_decay(when)
                else:
                    self._next_lift = when + self.dsp_fraction * self._period() + self._jitter()
                self._touchdown_time = math.inf
            elif self._mode in ("dsp", "stand") and t >= self._next_lift:
                if self._stopping or self.tempo <= 0.0:
                    self._mode = "stand"
                    self._next_lift = math.inf
                    continue
                when = self._next_lift
                swing = self._next_swing
                self.contact[swing] = False
                self._support = swing.other
                if self._mode == "stand":
                    # join the periodic sway mid-cycle, as if the last
                    # touchdown had happened one double-support ago
                    self._anchor_sway(
                        self.foot_y[self._support], when, lead=self.dsp_fraction * self._period()
                    )
                self._mode = "swing"
                self._touchdown_time = when + (1.0 - self.dsp_fraction) * self._period() + self._jitter()
                self._next_lift = math.inf
            else:
                break
        self._t = t

    def frontal_state(self, t: float) -> tuple[float, float]:
        dtau = max(t - self._fr_t0, 0.0)
        if self._fr_mode == "decay":
            c = self._fr_v0 + _DECAY_RATE * self._fr_y0
            damp = math.exp(-_DECAY_RATE * dtau)
            y = (self._fr_y0 + c * dtau) * damp
            v = (c - _DECAY_RATE * (self._fr_y0 + c * dtau)) * damp
            return y, v
        w = self._omega
        ch = math.cosh(w * dtau)
        sh = math.sinh(w * dtau)
        dy = self._fr_y0 - self._fr_p
        return (
            self._fr_p + dy * ch + (self._fr_v0 / w) * sh,
            w * dy * sh + self._fr_v0 * ch,
        )

    @property
    def cop_y(self) -> float:
        if self._mode == "stand":
            return 0.0
        return self.foot_y[self._support]

    @property
    def swing_side(self) -> Side | None:
        return self._next_swing if self._mode == "swing" else None

    def swing_foot_y(self) -> float:
        side = self.swing_side
        if side is None:
            return 0.0
        return self.foot_y[side]


class _SchedulerPilot:
    """Shared plumbing: observation assembly over a scheduler and a plant."""

    def __init__(self, params: LipParams, scheduler: FootfallScheduler) -> None:
        self.params = params
        self.scheduler = scheduler
        self.plant = PilotPlantState(0.0, 0.0)
        self._f_pilot = 0.0

    def _observation(self, t: float) -> PilotObservation:
        sched = self.scheduler
        y, ydot = sched.frontal_state(t)
        return PilotObservation(
            timestamp=t,
            com_x=self.plant.x,
            com_xdot=self.plant.xdot,
            contact_left=sched.contact[Side.LEFT],
            contact_right=sched.contact[Side.RIGHT],
            contact_force_x=self._f_pilot,
            com_y=y,
            com_ydot=ydot,
            cop_y=sched.cop_y,
            foot_y_left=sched.foot_y[Side.LEFT],
            foot_y_right=sched.foot_y[Side.RIGHT],
        )

    def observe(self, t: float) -> PilotObservation:
        return self._observation(t)

    def advance(self, t: float, dt: float, feedback: PilotFeedback) -> None:
        self.scheduler.step_to(t + dt)


class PeriodicStepperPilot(_SchedulerPilot):
    """Steps in place: CoM pinned at the origin, contacts alternating."""

    def __init__(
        self,
        params: LipParams,
        tempo: float = 3.33,
        half_width: float = 0.05,
        dsp_fraction: float = 1.0 / 6.0,
        start_time: float = 0.3,
        timing_jitter_std: float = 0.0,
        com_jitter_std: float = 0.0,
        seed: int = 0,
    ) -> None:
        rng = random.Random(seed)
        super().__init__(
            params,
            FootfallScheduler(
                params,
                tempo,
                half_width=half_width,
                dsp_fraction=dsp_fraction,
                start_time=start_time,
                timing_jitter_std=timing_jitter_std,
                rng=rng,
            ),
        )
        self._com_jitter_std = com_jitter_std
        self._rng = rng
        self._com_x = 0.0

    def observe(self, t: float) -> PilotObservation:
        obs = self._observation(t)
        if self._com_jitter_std > 0.0:
            obs = PilotObservation(
                **{**obs.__dict__, "com_x": self._rng.gauss(0.0, self._com_jitter_std)}
            )
        return obs


def _smootherstep(u: float) -> tuple[float, float, float]:
    """C2 ramp and its first two derivatives on u in [0, 1]."""
    if u <= 0.0:
        return 0.0, 0.0, 0.0
    if u >= 1.0:
        return 1.0, 0.0, 0.0
    s = u * u * u * (u * (6.0 * u - 15.0) + 10.0)
    ds = 30.0 * u * u * (u - 1.0) * (u - 1.0)
    dds = 60.0 * u * (2.0 * u - 1.0) * (u - 1.0)
    return s, ds, dds


class LeanWalkPilot(_SchedulerPilot):
    """Walks the robot: ramps the CoM forward, holds, ramps back, stops.

    The commanded CoM profile is tracked through the pilot plant with a
    PD-plus-feedforward effort, so the haptic feedback force genuinely
    perturbs what the pilot achieves. A trained pilot anticipates the
    virtual spring; `spring_comp` scales how completely.
    """

    def __init__(
        self,
        params: LipParams,
        tempo: float = 2.5,
        lean: float = 0.32,
        ramp_start: float = 1.0,
        ramp_time: float = 1.5,
        hold_time: float = 4.5,
        stop_time: float | None = None,
        start_time: float = 0.3,
        half_width: float = 0.05,
        dsp_fraction: float = 1.0 / 6.0,
        kp: float = 2000.0,
        kd: float = 700.0,
        spring_comp: float = 1.0,
        workspace_limit: float = 0.60,
    ) -> None:
        super().__init__(
            params,
            FootfallScheduler(
                params, tempo, half_width=half_width, dsp_fraction=dsp_fraction,
                start_time=start_time,
            ),
        )
        self.lean = lean
        self.t0 = ramp_start
        self.t1 = ramp_start + ramp_time
        self.t2 = self.t1 + hold_time
        self.t3 = self.t2 + ramp_time
        self.stop_time = stop_time if stop_time is not None else self.t3 + 1.0
        self.kp = kp
        self.kd = kd
        self.spring_comp = spring_comp
        self.workspace_limit = workspace_limit
        self._stopped = False

    def _command(self, t: float) -> tuple[float, float, float]:
        if t < self.t1:
            span = max(self.t1 - self.t0, 1e-9)
            s, ds, dds = _smootherstep((t - self.t0) / span)
            return self.lean * s, self.lean * ds / span, self.lean * dds / span**2
        if t < self.t2:
            return self.lean, 0.0, 0.0
        span = max(self.t3 - self.t2, 1e-9)
        s, ds, dds = _smootherstep((t - self.t2) / span)
        return self.lean * (1.0 - s), -self.lean * ds / span, -self.lean * dds / span**2

    def advance(self, t: float, dt: float, feedback: PilotFeedback) -> None:
        x_cmd, v_cmd, a_cmd = self._command(t)
        f = (
            self.params.mass * a_cmd
            + self.kp * (x_cmd - self.plant.x)
            + self.kd * (v_cmd - self.plant.xdot)
            + self.spring_comp * feedback.f_s
        )
        self._f_pilot = f
        self.plant = pilot_plant_tick(
            self.plant, f, feedback.f_s, feedback.f_hmi, dt, self.params,
            self.workspace_limit,
        )
        if not self._stopped and t >= self.stop_time:
            self.scheduler.request_stop()
            self._stopped = True
        self.scheduler.step_to(t + dt)


class ReactiveBalancePilot(_SchedulerPilot):
    """Steps in place, recenters against haptic pushes, reflex-steps on kicks.

    Proportional-derivative recentering lets a sustained haptic push displace
    the CoM (offset = push / kp), which is exactly how a disturbance on the
    robot is converted into forward stepping intent. A push beyond the reflex
    threshold slams the swing foot down early, once per refractory window.
    """

    def __init__(
        self,
        params: LipParams,
        tempo: float = 3.33,
        half_width: float = 0.05,
        dsp_fraction: float = 1.0 / 6.0,
        start_time: float = 0.3,
        kp: float = 1200.0,
        kd: float = 500.0,
        reflex_threshold: float = 60.0,
        refractory: float = 0.25,
        workspace_limit: float = 0.25,
    ) -> None:
        super().__init__(
            params,
            FootfallScheduler(
                params, tempo, half_width=half_width, dsp_fraction=dsp_fraction,
                start_time=start_time,
            ),
        )
        self.kp = kp
        self.kd = kd
        self.reflex_threshold = reflex_threshold
        self.refractory = refractory
        self.workspace_limit = workspace_limit
        self._refractory_until = -math.inf

    def advance(self, t: float, dt: float, feedback: PilotFeedback) -> None:
        f = -self.kp * self.plant.x - self.kd * self.plant.xdot
        self._f_pilot = f
        self.plant = pilot_plant_tick(
            self.plant, f, feedback.f_s, feedback.f_hmi, dt, self.params,
            self.workspace_limit,
        )
        if abs(feedback.f_hmi) > self.reflex_threshold and t >= self._refractory_until:
            self.scheduler.reflex_step(t)
            self._refractory_until = t + self.refractory
        self.scheduler.step_to(t + dt)


class ExternalPilot(_SchedulerPilot):
    """Live source: latches lean/tempo/stop commands onto the pilot plant.

    Commands are latest-wins per field and take effect at the next tick.
    Out-of-range values are clamped and flagged in the sanitized echo so the
    session can report them.
    """

    LEAN_RANGE = 1.0
    TEMPO_RANGE = (0.0, 4.0)

    def __init__(
        self,
        params: LipParams,
        lean_scale: float = 0.08,
        tempo: float = 0.0,
        half_width: float = 0.05,
        dsp_fraction: float = 1.0 / 6.0,
        kp: float = 1200.0,
        kd: float = 500.0,
        workspace_limit: float = 0.10,
    ) -> None:
        super().__init__(
            params,
            FootfallScheduler(
                params, tempo, half_width=half_width, dsp_fraction=dsp_fraction,
                start_time=math.inf if tempo <= 0.0 else 0.3,
            ),
        )
        self.lean_scale = lean_scale
        self.kp = kp
        self.kd = kd
        self.workspace_limit = workspace_limit
        self._lean = 0.0
        self._pending: list[PilotCommand] = []

    def apply_command(self, cmd: PilotCommand) -> dict:
        """Queue a command for the next tick; returns the sanitized record."""
        record: dict = {}
        lean = cmd.lean
        if lean is not None:
            clamped = min(max(lean, -self.LEAN_RANGE), self.LEAN_RANGE)
            record["lean"] = clamped
            record["lean_clamped"] = clamped != lean
        tempo = cmd.tempo
        if tempo is not None:
            clamped_t = min(max(tempo, self.TEMPO_RANGE[0]), self.TEMPO_RANGE[1])
            record["tempo"] = clamped_t
            record["tempo_clamped"] = clamped_t != tempo
        if cmd.stop is not None:
            record["stop"] = bool(cmd.stop)
        self._pending.append(
            PilotCommand(
                lean=record.get("lean"),
                tempo=record.get("tempo"),
                stop=record.get("stop"),
            )
        )
        return record

    def _latch(self, now: float) -> None:
        for cmd in self._pending:
            if cmd.lean is not None:
                self._lean = cmd.lean
            if cmd.tempo is not None:
                self.scheduler.set_tempo(cmd.tempo, now)
            if cmd.stop:
                self.scheduler.request_stop()
        self._pending.clear()

    def advance(self, t: float, dt: float, feedback: PilotFeedback) -> None:
        self._latch(t)
        target = self._lean * self.lean_scale
        f = self.kp * (target - self.plant.x) - self.kd * self.plant.xdot
        self._f_pilot = f
        self.plant = pilot_plant_tick(
            self.plant, f, feedback.f_s, feedback.f_hmi, dt, self.params,
            self.workspace_limit,
        )
        self.scheduler.step_to(t + dt)


class TraceReplayPilot:
    """Replays the pilot columns of a recorded trace, one row per tick."""

    def __init__(self, rows: list[PilotObservation]) -> None:
        if not rows:
            raise ValueError("empty pilot trace")
        self._rows = rows
        self._i = 0

    def observe(self, t: float) -> PilotObservation:
        row = self._rows[min(self._i, len(self._rows) - 1)]
        # re-stamp so session timestamps stay strictly increasing even if
        # the replayed trace is shorter than the scenario
        return PilotObservation(**{**row.__dict__, "timestamp": t})

    def advance(self, t: float, dt: float, feedback: PilotFeedback) -> None:
        self._i += 1
