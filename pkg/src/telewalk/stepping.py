"""Step placement that keeps normalized DCM tracking invariant to the reset.

At a step transition the robot CoM coordinate jumps by the step length; this
module computes the length for which the scale-normalized DCM of robot and
walking reference agree immediately after the jump, plus a feedforward term
for drift accumulated over the double-support dwell.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["StepPlanInput", "PlannedStep", "nominal_step_length", "closed_loop_step_length"]


@dataclass(frozen=True)
class StepPlanInput:
    xi_robot: float        # robot sagittal DCM at the planning instant, m
    xdot_robot: float      # robot sagittal CoM velocity, m/s
    xi_ref_plus: float     # reference begin-of-step DCM, m (reference scale)
    height_ratio: float    # robot CoM height / reference CoM height
    t_dsp: float           # assumed double-support duration, s
    max_length: float = float("inf")  # kinematic step-length clamp, m

    def __post_init__(self) -> None:
        if self.height_ratio <= 0.0:
            raise ValueError("height_ratio must be positive")
        if self.t_dsp < 0.0:
            raise ValueError("t_dsp must be non-negative")


@dataclass(frozen=True)
class PlannedStep:
    length: float
    raw_length: float
    clamped: bool


def nominal_step_length(xi_robot_minus: float, xi_ref_plus: float, height_ratio: float) -> float:
    """Length for which the post-reset normalized DCMs match exactly.

    The reset subtracts the step length from both the CoM position and the
    DCM, so l = xi_robot - xi_ref_plus * h_ratio lands the robot DCM on the
    scaled reference begin-of-step DCM.
    """
    return xi_robot_minus - xi_ref_plus * height_ratio


def closed_loop_step_length(inp: StepPlanInput) -> PlannedStep:
    """Nominal law at the live DCM plus double-support drift feedforward.

    The result is clamped to the kinematic limit; callers should surface the
    clamp flag, since a clamped step breaks the exact reset invariance.
    """
    raw = (
        nominal_step_length(inp.xi_robot, inp.xi_ref_plus, inp.height_ratio)
        + inp.xdot_robot * inp.t_dsp
    )
    length = min(max(raw, -inp.max_length), inp.max_length)
    return PlannedStep(length=length, raw_length=raw, clamped=length != raw)
