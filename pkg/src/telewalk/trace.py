"""Tick-by-tick run records: CSV trace, JSONL event stream, readers.

One CSV row per tick in a fixed, versioned column order; floats are written
with ``repr`` (shortest round-trip) so identical runs produce byte-identical
files. Wall-clock quantities never enter the trace; they live in the run
summary only.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .reference import PilotObservation

__all__ = ["TRACE_SCHEMA", "COLUMNS", "SimTrace", "pilot_observations_from_trace"]

TRACE_SCHEMA = "telewalk_trace_v1"

COLUMNS: tuple[str, ...] = (
    "time_s",
    "tick",
    "phase",
    "phase_time_s",
    "stance_side",
    "stance_foot_world_x_m",
    "front_foot_dx_m",
    "pilot_foot_left_y_m",
    "pilot_foot_right_y_m",
    "x_r_m",
    "xdot_r_mps",
    "y_r_m",
    "ydot_r_mps",
    "world_x_m",
    "xi_r_m",
    "xi_r_norm",
    "ref_x_m",
    "ref_xdot_mps",
    "ref_xi_m",
    "ref_xi_norm",
    "ref_xi_plus_m",
    "ref_step_time_s",
    "ref_phase_time_s",
    "ref_elongated",
    "pilot_com_x_m",
    "pilot_com_xdot_mps",
    "pilot_contact_left",
    "pilot_contact_right",
    "pilot_force_x_n",
    "pilot_com_y_m",
    "pilot_com_ydot_mps",
    "pilot_cop_y_m",
    "pilot_dcm_m",
    "f_ff_n",
    "f_fb_n",
    "f_hmi_n",
    "f_s_n",
    "f_ext_n",
    "f_ref_n",
    "f_fb_y_n",
    "cop_x_cmd_m",
    "cop_y_cmd_m",
    "cop_x_m",
    "cop_y_m",
    "sat_x",
    "sat_y",
    "cop_x_lb_m",
    "cop_x_ub_m",
    "cop_y_lb_m",
    "cop_y_ub_m",
    "f_contact_x_n",
    "f_contact_y_n",
    "event",
    "step_length_m",
    "xi_r_minus_m",
    "xi_ref_plus_used_m",
    "planner_clamped",
    "fall",
    "diverged",
)

_STR_COLUMNS = frozenset({"phase", "stance_side", "event"})
_INT_COLUMNS = frozenset(
    {
        "tick",
        "ref_elongated",
        "pilot_contact_left",
        "pilot_contact_right",
        "sat_x",
        "sat_y",
        "planner_clamped",
        "fall",
        "diverged",
    }
)


def _format(col: str, value) -> str:
    if col in _STR_COLUMNS:
        return str(value)
    if col in _INT_COLUMNS:
        return str(int(value))
    return repr(float(value))


class SimTrace:
    """In-memory run record: one tuple per tick plus an event list."""

    def __init__(self) -> None:
        self.rows: list[tuple] = []
        self.events: list[dict] = []

    def append(self, values: dict) -> None:
        self.rows.append(tuple(values[c] for c in COLUMNS))

    def add_event(self, event: dict) -> None:
        self.events.append(event)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        i = COLUMNS.index(name)
        return [row[i] for row in self.rows]

    def value(self, tick: int, name: str):
        return self.rows[tick][COLUMNS.index(name)]

    def to_csv_bytes(self) -> bytes:
        lines = [f"# {TRACE_SCHEMA}", ",".join(COLUMNS)]
        for row in self.rows:
            lines.append(",".join(_format(c, v) for c, v in zip(COLUMNS, row)))
        return ("\n".join(lines) + "\n").encode("utf-8")

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_csv_bytes())

    def write_events(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for event in self.events:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def checksum(self) -> str:
        return hashlib.sha256(self.to_csv_bytes()).hexdigest()

    @classmethod
    def read_csv(cls, path: str | Path) -> "SimTrace":
        trace = cls()
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline().strip()
            if first != f"# {TRACE_SCHEMA}":
                raise ValueError(f"unrecognized trace schema line: {first!r}")
            header = fh.readline().strip().split(",")
            if tuple(header) != COLUMNS:
                raise ValueError("trace columns do not match this schema version")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                row = []
                for col, part in zip(COLUMNS, parts):
                    if col in _STR_COLUMNS:
                        row.append(part)
                    elif col in _INT_COLUMNS:
                        row.append(int(part))
                    else:
                        row.append(float(part))
                trace.rows.append(tuple(row))
        return trace

    @staticmethod
    def read_events(path: str | Path) -> list[dict]:
        events = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events


def pilot_observations_from_trace(trace: SimTrace) -> list[PilotObservation]:
    """Rebuild the pilot observation stream recorded in a trace."""
    idx = {c: COLUMNS.index(c) for c in COLUMNS}
    rows = []
    for row in trace.rows:
        rows.append(
            PilotObservation(
                timestamp=row[idx["time_s"]],
                com_x=row[idx["pilot_com_x_m"]],
                com_xdot=row[idx["pilot_com_xdot_mps"]],
                contact_left=bool(row[idx["pilot_contact_left"]]),
                contact_right=bool(row[idx["pilot_contact_right"]]),
                contact_force_x=row[idx["pilot_force_x_n"]],
                com_y=row[idx["pilot_com_y_m"]],
                com_ydot=row[idx["pilot_com_ydot_mps"]],
                cop_y=row[idx["pilot_cop_y_m"]],
                foot_y_left=row[idx["pilot_foot_left_y_m"]],
                foot_y_right=row[idx["pilot_foot_right_y_m"]],
            )
        )
    return rows
