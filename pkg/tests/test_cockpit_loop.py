"""Cockpit-loop envelope: start, lean to walk, kick, stop — over the wire.

The human-facing half of the loop lives in frontend/ (vitest covers its
logic); this exercises the server side of the same sequence end to end
through the WebSocket against a wall-clock-paced session, including the
snapshot-rate and command-round-trip budgets.
"""

from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from telewalk.config import ScenarioConfig
from telewalk.service import create_app


@pytest.fixture()
def live_template() -> ScenarioConfig:
    return ScenarioConfig.model_validate(
        {
            "name": "cockpit",
            "duration_s": 12.0,
            "pilot": {"kind": "external", "tempo_hz": 0.0},
        }
    )


def drain_until(ws, predicate, timeout: float):
    deadline = time.perf_counter() + timeout
    last = None
    while time.perf_counter() < deadline:
        msg = json.loads(ws.receive_text())
        if msg["type"] == "snapshot":
            last = msg
            if predicate(msg):
                return msg
    raise AssertionError(f"condition not reached; last snapshot: {last}")


def test_cockpit_loop_walk_kick_stop(live_template):
    app = create_app(live_template, realtime=True, snapshot_hz=60)
    with TestClient(app) as client:
        with client.websocket_connect("/session") as ws:
            ws.send_text(json.dumps({"type": "session", "action": "start"}))
            drain_until(ws, lambda m: m["session_state"] == "running", 5.0)

            # round trip: lean command -> pilot CoM starts moving in the
            # snapshot stream (budget: 150 ms on localhost)
            sent_at = time.perf_counter()
            ws.send_text(json.dumps({"type": "pilot", "lean": 1.0, "tempo": 3.0}))
            drain_until(ws, lambda m: abs(m["pilot"]["com_x_m"]) > 5e-4, 5.0)
            round_trip = time.perf_counter() - sent_at
            assert round_trip < 0.150, f"round trip {round_trip * 1e3:.0f} ms"

            # snapshot stream sustained at >= 30 Hz while walking starts
            t0 = time.perf_counter()
            frames = 0
            world_x = 0.0
            while time.perf_counter() - t0 < 1.0:
                msg = json.loads(ws.receive_text())
                if msg["type"] == "snapshot":
                    frames += 1
                    world_x = msg["robot"]["world_x_m"]
            assert frames >= 30, f"only {frames} snapshots in 1 s"

            # the lean initiated forward walking
            moving = drain_until(ws, lambda m: m["robot"]["world_x_m"] > 0.03, 10.0)
            assert moving["robot"]["world_x_m"] > max(world_x * 0.5, 0.03)

            # fire the 30 N kick and watch the disturbance gauge
            ws.send_text(json.dumps({"type": "disturb", "force_n": 30.0, "duration_s": 0.3}))
            kicked = drain_until(ws, lambda m: m["forces"]["f_ext_n"] == 30.0, 5.0)

            # trained-pilot stop (what the UI stop button does): recenter the
            # lean, keep stepping while the reference dies down, then halt
            ws.send_text(json.dumps({"type": "pilot", "lean": 0.0}))
            drain_until(
                ws, lambda m: m["time_s"] > kicked["time_s"] + 1.5, 10.0
            )
            ws.send_text(json.dumps({"type": "pilot", "stop": True}))
            stopped = drain_until(
                ws,
                lambda m: m["pilot"]["contact_left"]
                and m["pilot"]["contact_right"]
                and abs(m["robot"]["xdot_mps"]) < 0.05
                and m["time_s"] > kicked["time_s"] + 2.0,
                10.0,
            )
            assert not stopped["fall"] and not stopped["diverged"]
            print(
                f"\ncockpit loop: round trip {round_trip * 1e3:.0f} ms, "
                f"{frames} snapshots/s, walked to {moving['robot']['world_x_m']:.3f} m, "
                f"kick seen at t={kicked['time_s']:.2f} s, stopped cleanly"
            )
            ws.send_text(json.dumps({"type": "session", "action": "reset"}))
