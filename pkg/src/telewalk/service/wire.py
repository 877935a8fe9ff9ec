"""Wire message schemas for the live-session WebSocket.

Everything crossing the socket is validated against these models; rejected
commands always produce an error reply, never a silent drop. The JSON
schemas are served at /schemas/command and /schemas/snapshot and exported to
the repo's ``schemas/`` directory.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter

__all__ = [
    "PilotCommandMsg",
    "DisturbCommandMsg",
    "SessionControlMsg",
    "WireCommand",
    "parse_command",
    "AckReply",
    "ErrorReply",
    "WireStateSnapshot",
]


class _Msg(BaseModel):
    model_config = {"extra": "forbid"}


class PilotCommandMsg(_Msg):
    type: Literal["pilot"]
    lean: float | None = None
    tempo: float | None = None
    stop: bool | None = None


class DisturbCommandMsg(_Msg):
    type: Literal["disturb"]
    force_n: float = Field(ge=-500.0, le=500.0)
    duration_s: float = Field(gt=0.0, le=5.0)


class SessionControlMsg(_Msg):
    type: Literal["session"]
    action: Literal["start", "pause", "reset"]


WireCommand = Union[PilotCommandMsg, DisturbCommandMsg, SessionControlMsg]

_command_adapter: TypeAdapter = TypeAdapter(
    Annotated[WireCommand, Field(discriminator="type")]
)


def parse_command(payload) -> WireCommand:
    return _command_adapter.validate_python(payload)


def command_json_schema() -> dict:
    return _command_adapter.json_schema()


class AckReply(_Msg):
    type: Literal["ack"] = "ack"
    applied_tick: int | None = None
    detail: str = ""


class ErrorReply(_Msg):
    type: Literal["error"] = "error"
    reason: str


class SnapshotRobot(_Msg):
    world_x_m: float
    y_m: float
    xdot_mps: float
    ydot_mps: float
    stance_foot_world_x_m: float
    phase: str
    phase_time_s: float
    stance_side: str


class SnapshotReference(_Msg):
    x_m: float
    xdot_mps: float
    xi_m: float
    xi_norm: float
    elongated: bool


class SnapshotPilot(_Msg):
    com_x_m: float
    com_y_m: float
    contact_left: bool
    contact_right: bool


class SnapshotForces(_Msg):
    f_hmi_n: float
    f_s_n: float
    f_ext_n: float
    f_ff_n: float
    f_fb_n: float


class SnapshotStep(_Msg):
    t: float
    kind: str
    length_m: float
    stance: str


class WireStateSnapshot(_Msg):
    type: Literal["snapshot"] = "snapshot"
    session_state: str
    tick: int
    time_s: float
    realtime_factor: float | None = None
    robot: SnapshotRobot
    reference: SnapshotReference
    pilot: SnapshotPilot
    forces: SnapshotForces
    xi_r_norm: float
    last_step: SnapshotStep | None = None
    fall: bool = False
    diverged: bool = False
