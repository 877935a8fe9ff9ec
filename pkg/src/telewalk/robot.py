"""Reduced-order bipedal robot plant.

Two decoupled non-passive pendulum planes, a CoP admissibility box spanning
the supporting feet, a reset map that re-expresses the sagittal CoM in the
new stance frame at each step transition, and a support-phase state machine
slaved to the pilot's foot contacts. Swing-leg dynamics are ignored; the
swing foot is pure kinematic bookkeeping.

The sagittal CoM coordinate is expressed relative to the current stance
foot; the frontal coordinate is absolute (relative to the gait midline).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .lip import LipParams, PlanarState

__all__ = [
    "Phase",
    "Side",
    "FootGeometry",
    "FeetState",
    "RobotState",
    "CopBounds",
    "StepEvent",
    "cop_bounds",
    "saturate_cop",
    "force_to_cop",
    "integrate_tick",
    "apply_reset",
    "GaitFsm",
    "swing_foot_target",
]


class Phase(str, enum.Enum):
    DSP = "dsp"
    SSP_LEFT = "ssp_left"
    SSP_RIGHT = "ssp_right"


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class FootGeometry:
    length: float  # m, sagittal extent of one foot
    width: float   # m, frontal extent of one foot

    def __post_init__(self) -> None:
        if self.length <= 0.0 or self.width <= 0.0:
            raise ValueError("foot geometry must be positive")


@dataclass
class FeetState:
    """Where the feet are: stance-frame sagittal offsets and absolute y."""

    stance_side: Side = Side.LEFT
    behind_dx: float = 0.0       # previous stance foot, stance frame (<= 0 walking fwd)
    front_dx: float | None = None  # landed swing foot during DSP, stance frame
    foot_y: dict[Side, float] = field(default_factory=lambda: {Side.LEFT: 0.0, Side.RIGHT: 0.0})

    @property
    def stance_y(self) -> float:
        return self.foot_y[self.stance_side]


@dataclass
class RobotState:
    sagittal: PlanarState
    frontal: PlanarState
    stance_foot_world_x: float = 0.0
    phase: Phase = Phase.DSP
    phase_time: float = 0.0

    @property
    def world_x(self) -> float:
        return self.stance_foot_world_x + self.sagittal.x


@dataclass(frozen=True)
class CopBounds:
    x_lb: float
    x_ub: float
    y_lb: float
    y_ub: float

    def __post_init__(self) -> None:
        if self.x_lb > self.x_ub or self.y_lb > self.y_ub:
            raise ValueError("inverted CoP bounds")


@dataclass(frozen=True)
class StepEvent:
    kind: str                # "d_to_s" | "s_to_d"
    step_length: float       # reset length (d_to_s) or landing offset (s_to_d)
    timestamp: float
    stance_side: Side
    xi_robot_minus: float | None = None
    xi_robot_plus: float | None = None
    xi_ref_plus: float | None = None
    xdot_robot: float | None = None
    clamped: bool = False


def cop_bounds(phase: Phase, feet: FeetState, geometry: FootGeometry) -> CopBounds:
    """Admissible CoP box spanning the supporting feet.

    Single support: the stance foot outline. Double support: sagittally from
    the back foot heel to the front foot toe, frontally across both feet.
    """
    half_l = 0.5 * geometry.length
    half_w = 0.5 * geometry.width
    if phase is Phase.DSP:
        front = feet.front_dx if feet.front_dx is not None else 0.0
        xs = sorted((0.0, front))
        swing_y = feet.foot_y[feet.stance_side.other]
        ys = sorted((feet.stance_y, swing_y))
        return CopBounds(xs[0] - half_l, xs[1] + half_l, ys[0] - half_w, ys[1] + half_w)
    return CopBounds(-half_l, half_l, feet.stance_y - half_w, feet.stance_y + half_w)


def saturate_cop(
    cop_cmd: tuple[float, float], bounds: CopBounds
) -> tuple[tuple[float, float], tuple[bool, bool]]:
    """Clamp a commanded CoP into the box; flags mark each saturated axis."""
    px = min(max(cop_cmd[0], bounds.x_lb), bounds.x_ub)
    py = min(max(cop_cmd[1], bounds.y_lb), bounds.y_ub)
    return (px, py), (px != cop_cmd[0], py != cop_cmd[1])


def force_to_cop(f_cmd: float, state: PlanarState, params: LipParams) -> float:
    """CoP that realizes a commanded contact force: p = x - F/(m w^2)."""
    return state.x - f_cmd / (params.mass * params.omega_sq)


def _rk4_plane(
    x: float, v: float, omega_sq: float, cop: float, a_ext: float, dt: float
) -> tuple[float, float]:
    # classic RK4 on xddot = w^2 (x - p) + a_ext with p, a_ext held constant
    a1 = omega_sq * (x - cop) + a_ext
    x2 = x + 0.5 * dt * v
    v2 = v + 0.5 * dt * a1
    a2 = omega_sq * (x2 - cop) + a_ext
    x3 = x + 0.5 * dt * v2
    v3 = v + 0.5 * dt * a2
    a3 = omega_sq * (x3 - cop) + a_ext
    x4 = x + dt * v3
    v4 = v + dt * a3
    a4 = omega_sq * (x4 - cop) + a_ext
    xn = x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
    vn = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return xn, vn


def integrate_tick(
    state: RobotState,
    cop: tuple[float, float],
    f_ext: float,
    dt: float,
    params: LipParams,
) -> RobotState:
    """Advance both planes one fixed step; the disturbance acts sagittally."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    w2 = params.omega_sq
    sx, sv = _rk4_plane(state.sagittal.x, state.sagittal.xdot, w2, cop[0], f_ext / params.mass, dt)
    fy, fv = _rk4_plane(state.frontal.x, state.frontal.xdot, w2, cop[1], 0.0, dt)
    state.sagittal = PlanarState(sx, sv)
    state.frontal = PlanarState(fy, fv)
    state.phase_time += dt
    return state


def apply_reset(state: RobotState, step_length: float) -> RobotState:
    """Re-express the sagittal CoM in the new stance frame.

    Velocities and the frontal plane are untouched; the world-frame CoM
    position is continuous because the stance origin moves by the same
    amount.
    """
    state.sagittal = replace(state.sagittal, x=state.sagittal.x - step_length)
    state.stance_foot_world_x += step_length
    return state


class GaitFsm:
    """Support-phase machine driven by pilot contacts.

    Double support ends (d_to_s) when the pilot lifts the foot opposite the
    upcoming stance side and the minimum dwell has elapsed; single support
    ends (s_to_d) when the pilot's swing foot touches down. Both feet off
    the ground is contradictory input: the phase holds and a diagnostic flag
    is raised.
    """

    def __init__(self, min_dsp_dwell: float, initial_stance: Side = Side.LEFT) -> None:
        if min_dsp_dwell < 0.0:
            raise ValueError("min_dsp_dwell must be non-negative")
        self.min_dsp_dwell = min_dsp_dwell
        self.phase = Phase.DSP
        self.phase_time = 0.0
        self.stance_side = initial_stance
        self.contact_fault = False
        self._prev: tuple[bool, bool] | None = None
        self._pending_stance: Side | None = None

    def advance_time(self, dt: float) -> None:
        self.phase_time += dt

    def update(self, contact_left: bool, contact_right: bool) -> str | None:
        """Process this tick's contacts; returns "d_to_s", "s_to_d", or None."""
        if not contact_left and not contact_right:
            self.contact_fault = True
            self._prev = (contact_left, contact_right)
            return None

        prev = self._prev if self._prev is not None else (contact_left, contact_right)
        lifted_left = prev[0] and not contact_left
        lifted_right = prev[1] and not contact_right
        touched_left = contact_left and not prev[0]
        touched_right = contact_right and not prev[1]
        self._prev = (contact_left, contact_right)

        if self.phase is Phase.DSP:
            if lifted_left:
                self._pending_stance = Side.RIGHT
            elif lifted_right:
                self._pending_stance = Side.LEFT
            if self._pending_stance is not None and self.phase_time >= self.min_dsp_dwell:
                self.stance_side = self._pending_stance
                self._pending_stance = None
                self.phase = (
                    Phase.SSP_LEFT if self.stance_side is Side.LEFT else Phase.SSP_RIGHT
                )
                self.phase_time = 0.0
                return "d_to_s"
            return None

        swing = self.stance_side.other
        swing_touched = touched_left if swing is Side.LEFT else touched_right
        if swing_touched:
            self.phase = Phase.DSP
            self.phase_time = 0.0
            return "s_to_d"
        return None


def swing_foot_target(
    pilot_swing_y: float,
    step_length_preview: float,
    phase_time: float,
    step_time: float,
    behind_dx: float,
    height_ratio: float,
) -> tuple[float, float]:
    """Kinematic swing-foot target (stance-frame dx, absolute y).

    Sagittal: C1 smoothstep blend from the lift-off location to the live
    step-length preview, complete at the estimated step time. Frontal: the
    pilot's swing-foot lateral position scaled by CoM-height ratio.
    """
    if step_time <= 0.0:
        s = 1.0
    else:
        s = min(max(phase_time / step_time, 0.0), 1.0)
    blend = s * s * (3.0 - 2.0 * s)
    dx = behind_dx + (step_length_preview - behind_dx) * blend
    return dx, pilot_swing_y * height_ratio
