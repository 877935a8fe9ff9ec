"""Bilateral force coupling between pilot, walking reference, and robot.

Sagittal plane: the robot is driven by a feedforward force (the reference
contact force scaled by weight ratio) plus feedback on the normalized DCM
mismatch; the pilot feels a velocity-synchrony force plus any external
disturbance reflected by weight ratio, and works against a virtual spring
that represents the effort of sustaining the walking reference.

Frontal plane: the robot CoP tracks the height-scaled pilot CoP, with a
feedback term that holds the robot on the lateral periodic orbit consistent
with the pilot's cadence. The exact frontal law of the hardware lineage is
not reproducible here; this scaled-CoP form is a documented simplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lip import LipParams
from .reference import ReferenceState

__all__ = [
    "CouplingGains",
    "ForceSet",
    "reference_contact_force",
    "feedforward_force",
    "feedback_force",
    "hmi_force",
    "virtual_spring_force",
    "frontal_cop_sync",
    "FrontalOrbitTarget",
]


@dataclass(frozen=True)
class CouplingGains:
    k_x: float = 150.0  # N per unit of normalized sagittal DCM error
    k_y: float = 400.0  # N per unit of normalized frontal DCM error
    disturbance_reflection: bool = True

    def __post_init__(self) -> None:
        if self.k_x < 0.0 or self.k_y < 0.0:
            raise ValueError("feedback gains must be non-negative")


@dataclass(frozen=True)
class ForceSet:
    """Every coupling force active during one tick (N)."""

    f_ff: float = 0.0        # robot feedforward
    f_fb: float = 0.0        # robot sagittal DCM feedback
    f_hmi: float = 0.0       # haptic force on the pilot
    f_s: float = 0.0         # virtual spring on the pilot
    f_ext: float = 0.0       # external disturbance on the robot
    f_ref: float = 0.0       # walking-reference contact force
    f_fb_y: float = 0.0      # robot frontal feedback
    f_contact_x: float = 0.0  # achieved robot contact force, sagittal
    f_contact_y: float = 0.0  # achieved robot contact force, frontal


def reference_contact_force(ref: ReferenceState, params_h: LipParams) -> float:
    """Contact force of the walking reference (its CoP sits at the origin)."""
    return params_h.mass * params_h.omega_sq * ref.x


def feedforward_force(f_ref: float, params_h: LipParams, params_r: LipParams) -> float:
    """Reference contact force scaled to the robot.

    Because h*w^2 equals g on both sides, the four-factor scale collapses to
    the mass ratio; the full product is kept so the identity is checkable.
    """
    scale = (params_r.mass * params_r.com_height * params_r.omega_sq) / (
        params_h.mass * params_h.com_height * params_h.omega_sq
    )
    return scale * f_ref


def feedback_force(
    xi_ref: float,
    xi_robot: float,
    params_h: LipParams,
    params_r: LipParams,
    gains: CouplingGains,
) -> float:
    """Feedback on the normalized DCM gap; negative when the robot leads."""
    return gains.k_x * (xi_ref / params_h.com_height - xi_robot / params_r.com_height)


def hmi_force(
    xdot_robot: float,
    xdot_ref: float,
    f_ext: float,
    params_h: LipParams,
    params_r: LipParams,
    reflect_disturbance: bool = True,
) -> float:
    """Haptic force on the pilot: velocity asynchrony plus reflected push.

    The velocity term vanishes when robot and reference agree in normalized
    velocity; the reflection coefficient is exactly the mass ratio m_h/m_r.
    """
    mhw = params_h.mass * params_h.com_height * params_h.omega_sq
    sync = mhw * (
        xdot_robot / (params_r.com_height * params_r.omega)
        - xdot_ref / (params_h.com_height * params_h.omega)
    )
    if not reflect_disturbance:
        return sync
    reflected = mhw / (params_r.mass * params_r.com_height * params_r.omega_sq) * f_ext
    return sync + reflected


def virtual_spring_force(x_plus: float, params_h: LipParams) -> float:
    """Spring the pilot pushes against; equals the reference begin-of-step
    contact force, so forward intent (x_plus < 0) is felt as resistance."""
    return params_h.mass * params_h.omega_sq * x_plus


def frontal_cop_sync(
    cop_y_pilot: float,
    params_h: LipParams,
    params_r: LipParams,
    bounds: tuple[float, float],
) -> float:
    """Height-scaled pilot frontal CoP, clamped into the support bounds."""
    lo, hi = bounds
    scaled = cop_y_pilot * params_r.com_height / params_h.com_height
    return min(max(scaled, lo), hi)


class FrontalOrbitTarget:
    """Lateral DCM target that entrains the robot to the pilot's cadence.

    Tracking the pilot's frontal DCM one-to-one is infeasible for pendulums
    of different natural frequency on a shared clock (it demands CoP outside
    the foot), so the feedback target is instead the robot's own periodic
    lateral orbit through the stance foot, re-anchored at every touchdown.
    At anchor the boundary DCM is y_foot * tanh(w*T/2), the unique value for
    which alternating support at the stepping period closes an orbit. When
    stepping pauses the target decays to the midline instead of growing.
    """

    def __init__(self, params_r: LipParams, decay_rate: float = 3.0) -> None:
        self._omega = params_r.omega
        self._decay = decay_rate
        self._mode = "decay"
        self._stance_y = 0.0
        self._xi_anchor = 0.0
        self._anchor_time = 0.0
        self._period = math.inf

    @property
    def decaying(self) -> bool:
        return self._mode == "decay"

    def anchor(self, stance_y: float, period: float, clock: float) -> None:
        self._mode = "orbit"
        self._stance_y = stance_y
        self._xi_anchor = stance_y * math.tanh(0.5 * self._omega * period)
        self._anchor_time = clock
        self._period = period

    def start_decay(self, clock: float) -> None:
        xi = self.xi_target(clock)
        self._mode = "decay"
        self._xi_anchor = xi
        self._stance_y = 0.0
        self._anchor_time = clock

    def xi_target(self, clock: float) -> float:
        dt = max(clock - self._anchor_time, 0.0)
        if self._mode == "decay":
            return self._xi_anchor * math.exp(-self._decay * dt)
        # the orbit prediction is meaningful for one period at most; if the
        # next touchdown is late, hold the boundary value instead of growing
        dt = min(dt, self._period)
        return self._stance_y + (self._xi_anchor - self._stance_y) * math.exp(self._omega * dt)
