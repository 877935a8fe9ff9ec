"""Closed-form linear inverted pendulum (LIP) math.

Everything in here is stateless: constants for one pendulum, the analytic
solution of the passive pendulum, the divergent component of motion (DCM),
one-step periodic orbit geometry, and the scale/time normalizations used to
compare two pendulums of different size. No integration loop lives here.

Conventions: SI units throughout, +x forward (sagittal), +y leftward
(frontal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "LipParams",
    "PlanarState",
    "OrbitSpec",
    "ClosedFormCoeffs",
    "lip_accel",
    "contact_force",
    "closed_form_coeffs",
    "state_from_coeffs",
    "closed_form_passive",
    "dcm",
    "orbital_slope",
    "normalized_dcm_gap",
    "normalized_dcm_rate_gap",
]

# coth arguments below this are degenerate (step time ~ns); reject instead of
# silently returning a huge slope.
_MIN_COTH_ARG = 1e-9


@dataclass(frozen=True)
class LipParams:
    """Constants of one linear inverted pendulum.

    The natural frequency is always derived from gravity and height so that
    ``com_height * omega_sq == gravity`` holds to machine precision; it can
    never be set independently.
    """

    mass: float
    com_height: float
    gravity: float = 9.81
    natural_freq: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (self.com_height > 0.0 and math.isfinite(self.com_height)):
            raise ValueError(f"com_height must be positive, got {self.com_height}")
        if not (self.gravity > 0.0 and math.isfinite(self.gravity)):
            raise ValueError(f"gravity must be positive, got {self.gravity}")
        object.__setattr__(self, "natural_freq", math.sqrt(self.gravity / self.com_height))

    @property
    def omega(self) -> float:
        """Natural frequency sqrt(g/h) in 1/s."""
        return self.natural_freq

    @property
    def omega_sq(self) -> float:
        # g/h, not omega*omega: keeps h*omega_sq == g to one rounding.
        return self.gravity / self.com_height


@dataclass(frozen=True)
class PlanarState:
    """CoM position and velocity in one plane."""

    x: float
    xdot: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.xdot)):
            raise ValueError(f"non-finite planar state ({self.x}, {self.xdot})")


@dataclass(frozen=True)
class OrbitSpec:
    """One-step periodic orbit family: step time and its orbital slope."""

    step_time: float
    slope: float


@dataclass(frozen=True)
class ClosedFormCoeffs:
    """Coefficients (c1, c2) of x(t) = c1*e^{wt} + c2*e^{-wt}."""

    c1: float
    c2: float


def lip_accel(state: PlanarState, cop: float, params: LipParams) -> float:
    """CoM acceleration w^2 * (x - p) for centre of pressure p."""
    return params.omega_sq * (state.x - cop)


def contact_force(state: PlanarState, cop: float, params: LipParams) -> float:
    """Horizontal contact force m * w^2 * (x - p)."""
    return params.mass * params.omega_sq * (state.x - cop)


def closed_form_coeffs(init: PlanarState, params: LipParams) -> ClosedFormCoeffs:
    """Integration constants of the passive pendulum from an initial state."""
    w = params.omega
    return ClosedFormCoeffs(
        c1=0.5 * (init.x + init.xdot / w),
        c2=0.5 * (init.x - init.xdot / w),
    )


def state_from_coeffs(coeffs: ClosedFormCoeffs, params: LipParams) -> PlanarState:
    """Inverse of :func:`closed_form_coeffs`; round-trips exactly."""
    return PlanarState(
        x=coeffs.c1 + coeffs.c2,
        xdot=params.omega * (coeffs.c1 - coeffs.c2),
    )


def closed_form_passive(init: PlanarState, params: LipParams, t: float) -> PlanarState:
    """Exact passive-pendulum state at time t >= 0 (centre of pressure at 0)."""
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    w = params.omega
    c = closed_form_coeffs(init, params)
    grow = math.exp(w * t)
    decay = 1.0 / grow
    return PlanarState(
        x=c.c1 * grow + c.c2 * decay,
        xdot=w * (c.c1 * grow - c.c2 * decay),
    )


def dcm(state: PlanarState, params: LipParams) -> float:
    """Divergent component of motion xi = x + xdot/w."""
    return state.x + state.xdot / params.omega


def _coth(z: float) -> float:
    # 1 + 2/(e^{2z}-1) is exact for small z via expm1 and saturates cleanly
    # to 1.0 for large z instead of overflowing.
    if z > 20.0:
        return 1.0
    return 1.0 + 2.0 / math.expm1(2.0 * z)


def orbital_slope(step_time: float, params: LipParams) -> OrbitSpec:
    """Orbital slope sigma = w * coth(w * T/2) of the period-T orbit family.

    Boundary states of every one-step periodic orbit with this step time lie
    on the lines xdot = -sigma*x (start) and xdot = +sigma*x (end).
    """
    if step_time <= 0.0:
        raise ValueError(f"step time must be positive, got {step_time}")
    z = 0.5 * step_time * params.omega
    if z < _MIN_COTH_ARG:
        raise ValueError(f"degenerate coth argument {z} (step time {step_time})")
    return OrbitSpec(step_time=step_time, slope=params.omega * _coth(z))


def normalized_dcm_gap(
    a: PlanarState, pa: LipParams, b: PlanarState, pb: LipParams
) -> float:
    """Scale-normalized DCM mismatch xi_a/h_a - xi_b/h_b.

    Zero iff the kinematic similarity constraint between the two pendulums
    holds at this instant.
    """
    return dcm(a, pa) / pa.com_height - dcm(b, pb) / pb.com_height


def normalized_dcm_rate_gap(
    a_rate: float, pa: LipParams, b_rate: float, pb: LipParams
) -> float:
    """Scale-and-time-normalized DCM rate mismatch.

    Companion dynamic constraint to :func:`normalized_dcm_gap`:
    xi_dot_a/(h_a*w_a) - xi_dot_b/(h_b*w_b).
    """
    return a_rate / (pa.com_height * pa.omega) - b_rate / (pb.com_height * pb.omega)
