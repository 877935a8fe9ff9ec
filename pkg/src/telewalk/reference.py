"""Walking-reference generation from pilot stepping.

The pilot steps roughly in place inside a bounded workspace; from two gait
variables, step cadence and the (dead-banded) CoM surrogate of the pilot DCM,
we synthesize a full-size virtual walking gait: a passive pendulum moving
along a one-step periodic orbit whose end-of-step DCM equals the pilot's DCM.
The robot tracks this reference, not the pilot directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import exp
from typing import Deque, Sequence

from .lip import LipParams, PlanarState, closed_form_passive, dcm, orbital_slope

__all__ = [
    "PilotObservation",
    "RefGenConfig",
    "StepBoundary",
    "ReferenceState",
    "pilot_dcm_surrogate",
    "step_time_estimate",
    "end_of_step_state",
    "begin_of_step_state",
    "reference_dcm_traj",
    "make_step_boundary",
    "ReferenceGenerator",
]


@dataclass(frozen=True)
class PilotObservation:
    """One tick of pilot measurements.

    Sagittal CoM state and contact flags drive the walking reference; the
    frontal fields (CoM sway, centre of pressure, foot placements) drive the
    robot's lateral synchronization and the cockpit display.
    """

    timestamp: float
    com_x: float
    com_xdot: float
    contact_left: bool
    contact_right: bool
    contact_force_x: float = 0.0
    com_y: float = 0.0
    com_ydot: float = 0.0
    cop_y: float = 0.0
    foot_y_left: float = 0.0
    foot_y_right: float = 0.0


@dataclass(frozen=True)
class RefGenConfig:
    deadband: float = 0.01          # m, CoM dead-band of the DCM surrogate
    step_time_default: float = 0.4  # s, used until two touchdowns were seen
    step_time_min: float = 0.2      # s, clamp on the cadence estimate
    step_time_max: float = 0.8

    def __post_init__(self) -> None:
        if self.deadband < 0.0:
            raise ValueError("deadband must be non-negative")
        if not (0.0 < self.step_time_min <= self.step_time_default <= self.step_time_max):
            raise ValueError(
                "need 0 < step_time_min <= step_time_default <= step_time_max"
            )


@dataclass(frozen=True)
class StepBoundary:
    """Begin/end-of-step states of the reference orbit for one step."""

    x_minus: float
    xdot_minus: float
    x_plus: float
    xdot_plus: float
    xi_minus: float
    xi_plus: float
    step_time: float


@dataclass(frozen=True)
class ReferenceState:
    """Reference pendulum evaluated at the current phase time."""

    x: float
    xdot: float
    xi: float
    phase_time: float
    elongated: bool


def pilot_dcm_surrogate(obs: PilotObservation, cfg: RefGenConfig) -> float:
    """Dead-banded pilot CoM used in place of the pilot DCM.

    The velocity term of the DCM is deliberately dropped (it is noisy on real
    hardware); inside the dead-band the surrogate is exactly zero, outside it
    passes the raw CoM through.
    """
    if abs(obs.com_x) <= cfg.deadband:
        return 0.0
    return obs.com_x


def step_time_estimate(touchdowns: Sequence[float], cfg: RefGenConfig) -> float:
    """Assume the current step lasts as long as the previous one.

    Uses the interval between the last two pilot touchdowns, clamped to the
    configured range; falls back to the default before two touchdowns exist.
    """
    if len(touchdowns) < 2:
        return cfg.step_time_default
    interval = touchdowns[-1] - touchdowns[-2]
    return min(max(interval, cfg.step_time_min), cfg.step_time_max)


def end_of_step_state(step_time: float, xi_pilot: float, params: LipParams) -> tuple[float, float]:
    """End-of-step CoM state on the positive orbital line with DCM xi_pilot.

    Solves the pair {x + xdot/w = xi_pilot, xdot = sigma*x} so the reference
    both closes a periodic orbit and commits to the pilot's intent.
    """
    spec = orbital_slope(step_time, params)
    x_minus = xi_pilot / (1.0 + spec.slope / params.omega)
    xdot_minus = params.omega * (xi_pilot - x_minus)
    return x_minus, xdot_minus


def begin_of_step_state(end: tuple[float, float]) -> tuple[float, float]:
    """Mirror the end-of-step state onto the negative orbital line."""
    x_minus, xdot_minus = end
    return -x_minus, xdot_minus


def reference_dcm_traj(xi_plus: float, t: float, params: LipParams) -> float:
    """Reference DCM trajectory xi(t) = xi_plus * e^{w t}, t >= 0."""
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    return xi_plus * exp(params.omega * t)


def make_step_boundary(step_time: float, xi_pilot: float, params: LipParams) -> StepBoundary:
    """Full step boundary for the given cadence and pilot DCM."""
    x_minus, xdot_minus = end_of_step_state(step_time, xi_pilot, params)
    x_plus, xdot_plus = begin_of_step_state((x_minus, xdot_minus))
    return StepBoundary(
        x_minus=x_minus,
        xdot_minus=xdot_minus,
        x_plus=x_plus,
        xdot_plus=xdot_plus,
        xi_minus=dcm(PlanarState(x_minus, xdot_minus), params),
        xi_plus=dcm(PlanarState(x_plus, xdot_plus), params),
        step_time=step_time,
    )


@dataclass
class ReferenceGenerator:
    """Continuously regenerated walking reference.

    The step boundary is recomputed every tick from live pilot data, and the
    in-step state is the passive closed form evaluated at the phase time since
    the robot's last step transition. If the pilot holds a step longer than
    the cadence estimate, the same exponential keeps being evaluated past the
    nominal step time (trajectory elongation) rather than freezing.
    """

    params: LipParams
    config: RefGenConfig = field(default_factory=RefGenConfig)

    def __post_init__(self) -> None:
        self._touchdowns: Deque[float] = deque(maxlen=8)
        self._prev_contacts: tuple[bool, bool] | None = None
        self._anchor_time = 0.0
        self.boundary = make_step_boundary(
            self.config.step_time_default, 0.0, self.params
        )
        self.state = ReferenceState(0.0, 0.0, 0.0, 0.0, False)

    @property
    def touchdowns(self) -> tuple[float, ...]:
        return tuple(self._touchdowns)

    def notify_step(self, clock: float) -> None:
        """Restart the reference phase at a robot step transition."""
        self._anchor_time = clock

    def _record_touchdowns(self, obs: PilotObservation) -> None:
        contacts = (obs.contact_left, obs.contact_right)
        if self._prev_contacts is not None:
            for was, now in zip(self._prev_contacts, contacts):
                if now and not was:
                    self._touchdowns.append(obs.timestamp)
        self._prev_contacts = contacts

    def update(self, obs: PilotObservation, clock: float) -> ReferenceState:
        """Advance one tick: re-estimate the boundary, evaluate the orbit."""
        self._record_touchdowns(obs)
        step_time = step_time_estimate(self._touchdowns, self.config)
        xi_pilot = pilot_dcm_surrogate(obs, self.config)
        self.boundary = make_step_boundary(step_time, xi_pilot, self.params)

        phase_time = clock - self._anchor_time
        begin = PlanarState(self.boundary.x_plus, self.boundary.xdot_plus)
        now = closed_form_passive(begin, self.params, phase_time)
        self.state = ReferenceState(
            x=now.x,
            xdot=now.xdot,
            xi=dcm(now, self.params),
            phase_time=phase_time,
            elongated=phase_time > step_time,
        )
        return self.state
