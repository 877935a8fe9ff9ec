from __future__ import annotations

import math

import pytest

from telewalk.config import DisturbanceWindow, ScenarioConfig
from telewalk.engine import Simulation, compute_metrics, inject_disturbance, run_scenario
from telewalk.trace import COLUMNS, SimTrace


def cfg_step_in_place(**overrides) -> ScenarioConfig:
    base = {
        "name": "sip",
        "duration_s": 3.0,
        "pilot": {"kind": "periodic", "tempo_hz": 3.33, "start_s": 0.25},
    }
    base.update(overrides)
    return ScenarioConfig.model_validate(base)


class TestInjectDisturbance:
    W = [DisturbanceWindow(start_s=2.0, duration_s=0.3, force_n=30.0)]

    def test_outside_window_zero(self):
        assert inject_disturbance(self.W, 1.0) == 0.0
        assert inject_disturbance(self.W, 2.31) == 0.0

    def test_inside_window(self):
        assert inject_disturbance(self.W, 2.1) == 30.0

    def test_boundary_semantics(self):
        assert inject_disturbance(self.W, 2.0) == 30.0
        assert inject_disturbance(self.W, 2.3) == 0.0

    def test_overlapping_windows_superpose(self):
        windows = self.W + [DisturbanceWindow(start_s=2.05, duration_s=0.3, force_n=30.0)]
        assert inject_disturbance(windows, 2.1) == 60.0

    def test_ramp_profile_trapezoid(self):
        w = [DisturbanceWindow(start_s=0.0, duration_s=1.0, force_n=10.0, profile="ramp")]
        assert inject_disturbance(w, 0.1) == pytest.approx(5.0)
        assert inject_disturbance(w, 0.5) == pytest.approx(10.0)
        assert inject_disturbance(w, 0.9) == pytest.approx(5.0)


class TestRunBasics:
    def test_zero_duration_single_row(self):
        result = run_scenario(cfg_step_in_place(duration_s=0.0))
        assert len(result.trace) == 1
        assert result.trace.value(0, "time_s") == 0.0

    def test_row_count_and_timestamps(self):
        cfg = cfg_step_in_place(duration_s=1.0)
        result = run_scenario(cfg)
        assert len(result.trace) == 1001
        times = result.trace.column("time_s")
        for k, t in enumerate(times):
            assert t == k * cfg.dt_s

    def test_determinism_identical_checksums(self):
        cfg = cfg_step_in_place()
        a = run_scenario(cfg).trace.checksum()
        b = run_scenario(cfg).trace.checksum()
        assert a == b

    def test_noop_disturbance_window_does_not_change_trace(self):
        base = run_scenario(cfg_step_in_place()).trace.checksum()
        with_noop = run_scenario(
            cfg_step_in_place(
                disturbances=[{"start_s": 1.0, "duration_s": 0.2, "force_n": 0.0}]
            )
        ).trace.checksum()
        assert base == with_noop

    def test_seed_changes_jittered_trace(self):
        a = run_scenario(
            cfg_step_in_place(seed=1, pilot={"kind": "periodic", "com_jitter_std_m": 0.004})
        ).trace.checksum()
        b = run_scenario(
            cfg_step_in_place(seed=2, pilot={"kind": "periodic", "com_jitter_std_m": 0.004})
        ).trace.checksum()
        assert a != b


@pytest.fixture(scope="module")
def walk_result():
    return run_scenario(
        ScenarioConfig.model_validate(
            {
                "name": "walk",
                "duration_s": 8.0,
                "pilot": {
                    "kind": "lean_walk",
                    "lean_m": 0.25,
                    "hold_time_s": 2.5,
                    "stop_s": 7.0,
                    "workspace_limit_m": 0.6,
                },
            }
        )
    )


class TestTraceAudits:
    @pytest.fixture()
    def result(self, walk_result):
        return walk_result

    def test_contact_force_consistent_with_achieved_cop(self, result, robot):
        idx = {c: i for i, c in enumerate(COLUMNS)}
        for row in result.trace.rows:
            expect = robot.mass * robot.omega_sq * (row[idx["x_r_m"]] - row[idx["cop_x_m"]])
            assert abs(row[idx["f_contact_x_n"]] - expect) <= 1e-9

    def test_cop_always_inside_logged_bounds(self, result):
        idx = {c: i for i, c in enumerate(COLUMNS)}
        for row in result.trace.rows:
            assert row[idx["cop_x_lb_m"]] - 1e-15 <= row[idx["cop_x_m"]] <= row[idx["cop_x_ub_m"]] + 1e-15
            assert row[idx["cop_y_lb_m"]] - 1e-15 <= row[idx["cop_y_m"]] <= row[idx["cop_y_ub_m"]] + 1e-15

    def test_step_rows_satisfy_placement_law(self, result, robot, human):
        idx = {c: i for i, c in enumerate(COLUMNS)}
        t_dsp = 0.05
        rows = [r for r in result.trace.rows if r[idx["event"]] == "d_to_s"]
        assert rows, "expected step events"
        for row in rows:
            assert not row[idx["planner_clamped"]]
            lhs = row[idx["xi_r_m"]] / robot.com_height
            rhs = row[idx["xi_ref_plus_used_m"]] / human.com_height
            ff = row[idx["xdot_r_mps"]] * t_dsp / robot.com_height
            assert abs(lhs - rhs + ff) <= 1e-12

    def test_step_event_stream_matches_rows(self, result):
        idx = {c: i for i, c in enumerate(COLUMNS)}
        row_steps = sum(1 for r in result.trace.rows if r[idx["event"]] == "d_to_s")
        ev_steps = sum(
            1 for e in result.trace.events if e.get("type") == "step" and e["kind"] == "d_to_s"
        )
        assert row_steps == ev_steps

    def test_stance_alternates_between_steps(self, result):
        stances = [
            e["stance"]
            for e in result.trace.events
            if e.get("type") == "step" and e["kind"] == "d_to_s"
        ]
        for a, b in zip(stances, stances[1:]):
            assert a != b


class TestDivergenceAndFall:
    def test_reference_runaway_aborts(self):
        # pilot holds a large lean but never steps: the walking reference
        # grows unboundedly and the run must abort with a diagnostic index
        cfg = ScenarioConfig.model_validate(
            {
                "name": "nostep",
                "duration_s": 6.0,
                "pilot": {"kind": "external", "tempo_hz": 0.0, "lean_scale_m": 0.08,
                          "workspace_limit_m": 0.2},
            }
        )
        sim = Simulation(cfg)
        sim.schedule_command({"type": "pilot", "lean": 1.0}, tick=0)
        while not sim.finished:
            sim.tick()
        assert sim.diverged
        assert sim.diverged_tick is not None
        assert sim.fall  # CoP pinned long before the state runs away

    def test_divergence_recorded_in_events(self):
        cfg = ScenarioConfig.model_validate(
            {
                "name": "nostep",
                "duration_s": 6.0,
                "pilot": {"kind": "external", "tempo_hz": 0.0, "workspace_limit_m": 0.2},
            }
        )
        sim = Simulation(cfg)
        sim.schedule_command({"type": "pilot", "lean": 1.0}, tick=0)
        while not sim.finished:
            sim.tick()
        kinds = {e["type"] for e in sim.trace.events}
        assert "divergence" in kinds and "fall" in kinds


class TestComputeMetrics:
    def test_stationary_trace_metrics(self):
        result = run_scenario(cfg_step_in_place(duration_s=0.5,
                                                pilot={"kind": "periodic", "tempo_hz": 0.0}))
        summary = compute_metrics(result.trace, result.trace.events)
        assert summary.distance_m == 0.0
        assert summary.step_count == 0
        assert summary.top_speed_mps == 0.0

    def test_top_speed_is_max_abs(self):
        result = run_scenario(cfg_step_in_place(duration_s=1.0))
        expect = max(abs(v) for v in result.trace.column("xdot_r_mps"))
        summary = compute_metrics(result.trace, result.trace.events)
        assert summary.top_speed_mps == expect

    def test_rms_definition(self):
        result = run_scenario(cfg_step_in_place(duration_s=1.0))
        err = [
            a - b
            for a, b in zip(
                result.trace.column("xi_r_norm"), result.trace.column("ref_xi_norm")
            )
        ]
        expect = math.sqrt(sum(v * v for v in err) / len(err))
        assert compute_metrics(result.trace, result.trace.events).rms_dcm_error == expect

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            compute_metrics(SimTrace(), [])

    def test_resync_counts_steps_after_window(self):
        cfg = ScenarioConfig.model_validate(
            {
                "name": "kick",
                "duration_s": 6.0,
                "pilot": {"kind": "reactive", "tempo_hz": 3.33, "start_s": 0.25},
                "disturbances": [{"start_s": 2.0, "duration_s": 0.3, "force_n": 30.0}],
            }
        )
        result = run_scenario(cfg)
        assert len(result.summary.resync_steps) == 1
        n = result.summary.resync_steps[0]
        assert n is not None and n <= 4


class TestTraceRoundTrip:
    def test_csv_read_back_equals_written(self, tmp_path):
        result = run_scenario(cfg_step_in_place(duration_s=0.5))
        path = tmp_path / "trace.csv"
        result.trace.write_csv(path)
        loaded = SimTrace.read_csv(path)
        assert loaded.rows == result.trace.rows

    def test_schema_line_guard(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# other_schema\na,b\n")
        with pytest.raises(ValueError):
            SimTrace.read_csv(path)

    def test_events_round_trip(self, tmp_path):
        result = run_scenario(cfg_step_in_place(duration_s=1.0))
        path = tmp_path / "events.jsonl"
        result.trace.write_events(path)
        events = SimTrace.read_events(path)
        assert events == result.trace.events


class TestTraceReplayPilot:
    def test_replayed_pilot_reproduces_robot_trajectory(self, tmp_path):
        cfg = cfg_step_in_place(duration_s=2.0)
        first = run_scenario(cfg)
        path = tmp_path / "trace.csv"
        first.trace.write_csv(path)
        replay_cfg = ScenarioConfig.model_validate(
            {
                "name": "replay",
                "duration_s": 2.0,
                "pilot": {"kind": "trace", "path": str(path)},
            }
        )
        second = run_scenario(replay_cfg)
        assert second.trace.column("x_r_m") == first.trace.column("x_r_m")
        assert second.trace.column("xdot_r_mps") == first.trace.column("xdot_r_mps")
