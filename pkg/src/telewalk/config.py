"""Scenario configuration: validated models, defaults, and dotted overrides.

A scenario JSON file fully determines a run; identical configs (including
the seed) produce byte-identical traces. The JSON schema for these models is
exported to ``schemas/scenario_config.schema.json`` in the repo.
"""

from __future__ import annotations

import json
from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, model_validator

from .lip import LipParams
from .reference import RefGenConfig

__all__ = [
    "HumanBody",
    "RobotBody",
    "ReferenceSettings",
    "GainSettings",
    "DisturbanceWindow",
    "PilotSettings",
    "AcceptanceThresholds",
    "ScenarioConfig",
    "load_scenario",
    "apply_overrides",
    "OverrideError",
]


class _Strict(BaseModel):
    model_config = {"extra": "forbid"}


class HumanBody(_Strict):
    mass_kg: float = 75.0
    com_height_m: float = 1.20
    gravity: float = 9.81

    def to_params(self) -> LipParams:
        return LipParams(mass=self.mass_kg, com_height=self.com_height_m, gravity=self.gravity)


class RobotBody(_Strict):
    mass_kg: float = 20.2
    com_height_m: float = 0.55
    gravity: float = 9.81
    foot_length_m: float = 0.06
    foot_width_m: float = 0.03
    max_step_length_m: float = 0.30

    def to_params(self) -> LipParams:
        return LipParams(mass=self.mass_kg, com_height=self.com_height_m, gravity=self.gravity)


class ReferenceSettings(_Strict):
    deadband_m: float = 0.01
    step_time_default_s: float = 0.4
    step_time_min_s: float = 0.2
    step_time_max_s: float = 0.8

    def to_config(self) -> RefGenConfig:
        return RefGenConfig(
            deadband=self.deadband_m,
            step_time_default=self.step_time_default_s,
            step_time_min=self.step_time_min_s,
            step_time_max=self.step_time_max_s,
        )


class GainSettings(_Strict):
    k_x: float = 150.0
    k_y: float = 400.0
    disturbance_reflection: bool = True


class DisturbanceWindow(_Strict):
    start_s: float
    duration_s: float
    force_n: float
    profile: Literal["boxcar", "ramp"] = "boxcar"


class PeriodicPilotSettings(_Strict):
    kind: Literal["periodic"] = "periodic"
    tempo_hz: float = 3.33
    start_s: float = 0.3
    dsp_fraction: float = 1.0 / 6.0
    lateral_half_width_m: float = 0.05
    timing_jitter_std_s: float = 0.0
    com_jitter_std_m: float = 0.0


class LeanWalkPilotSettings(_Strict):
    kind: Literal["lean_walk"] = "lean_walk"
    tempo_hz: float = 2.5
    start_s: float = 0.3
    dsp_fraction: float = 1.0 / 6.0
    lateral_half_width_m: float = 0.05
    lean_m: float = 0.32
    ramp_start_s: float = 1.0
    ramp_time_s: float = 1.5
    hold_time_s: float = 4.5
    stop_s: float | None = None
    kp: float = 2000.0
    kd: float = 700.0
    spring_comp: float = 1.0
    workspace_limit_m: float = 0.60


class ReactivePilotSettings(_Strict):
    kind: Literal["reactive"] = "reactive"
    tempo_hz: float = 3.33
    start_s: float = 0.3
    dsp_fraction: float = 1.0 / 6.0
    lateral_half_width_m: float = 0.05
    kp: float = 1200.0
    kd: float = 500.0
    reflex_threshold_n: float = 60.0
    refractory_s: float = 0.25
    workspace_limit_m: float = 0.25


class ExternalPilotSettings(_Strict):
    kind: Literal["external"] = "external"
    lean_scale_m: float = 0.08
    tempo_hz: float = 0.0
    dsp_fraction: float = 1.0 / 6.0
    lateral_half_width_m: float = 0.05
    kp: float = 1200.0
    kd: float = 500.0
    workspace_limit_m: float = 0.10
    command_log: str | None = None  # JSONL of recorded commands to replay


class TracePilotSettings(_Strict):
    kind: Literal["trace"] = "trace"
    path: str


PilotSettings = Annotated[
    Union[
        PeriodicPilotSettings,
        LeanWalkPilotSettings,
        ReactivePilotSettings,
        ExternalPilotSettings,
        TracePilotSettings,
    ],
    Field(discriminator="kind"),
]


class AcceptanceThresholds(_Strict):
    """Optional pass/fail envelope evaluated by the suite runner."""

    min_steps: int | None = None
    max_steps: int | None = None
    min_distance_m: float | None = None
    max_mean_abs_speed: float | None = None
    max_rms_dcm_error: float | None = None
    top_speed_range: tuple[float, float] | None = None
    final_stop_speed: float | None = None   # max |xdot| over the final second
    max_resync_steps: int | None = None
    require_no_fall: bool = True


class ScenarioConfig(_Strict):
    schema_version: int = 1
    name: str = "scenario"
    duration_s: float = 6.0
    dt_s: float = 0.001
    seed: int = 0
    human: HumanBody = Field(default_factory=HumanBody)
    robot: RobotBody = Field(default_factory=RobotBody)
    reference: ReferenceSettings = Field(default_factory=ReferenceSettings)
    gains: GainSettings = Field(default_factory=GainSettings)
    t_dsp_s: float = 0.05
    pilot: PilotSettings = Field(default_factory=PeriodicPilotSettings)
    disturbances: list[DisturbanceWindow] = Field(default_factory=list)
    synchrony_threshold: float = 0.05
    fall_cop_saturation_s: float = 0.5
    divergence_limit_m: float = 10.0
    acceptance: AcceptanceThresholds | None = None

    @model_validator(mode="after")
    def _check(self) -> "ScenarioConfig":
        if self.dt_s <= 0.0:
            raise ValueError("dt_s must be positive")
        if self.duration_s < 0.0:
            raise ValueError("duration_s must be non-negative")
        if self.t_dsp_s < 0.0:
            raise ValueError("t_dsp_s must be non-negative")
        for d in self.disturbances:
            if d.start_s < 0.0 or d.start_s + d.duration_s > self.duration_s + 1e-12:
                raise ValueError(
                    f"disturbance window [{d.start_s}, {d.start_s + d.duration_s}] "
                    f"outside run [0, {self.duration_s}]"
                )
        return self


class OverrideError(ValueError):
    """Raised for unknown keys or unparseable values in --set overrides."""


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``dotted.path=value`` overrides and re-validate.

    Unknown keys are rejected so that scripted sweeps fail loudly instead of
    silently running the base scenario.
    """
    data = cfg.model_dump(mode="json")
    for item in overrides:
        if "=" not in item:
            raise OverrideError(f"override {item!r} is not of the form key=value")
        path, raw = item.split("=", 1)
        keys = path.split(".")
        node = data
        for key in keys[:-1]:
            if not isinstance(node, dict) or key not in node:
                raise OverrideError(f"unknown override key {path!r}")
            node = node[key]
        if not isinstance(node, dict) or keys[-1] not in node:
            raise OverrideError(f"unknown override key {path!r}")
        node[keys[-1]] = _parse_value(raw)
    try:
        return ScenarioConfig.model_validate(data)
    except Exception as exc:
        raise OverrideError(f"invalid override value: {exc}") from exc


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ScenarioConfig.model_validate(json.load(fh))
