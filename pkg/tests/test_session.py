import json
import math
from pathlib import Path

import pytest

from safespect import flightsim as fs
from safespect import hud
from safespect.engine import EngineConfig
from safespect.geometry import vdist
from safespect.session import Session, replay_log, run_script
from safespect.stock import build_stock
from safespect.telemetry import (
    InputFrame,
    ScenarioMismatch,
    canonical_line,
    parse_script,
    serialize_log,
)

CFG = EngineConfig()
SCRIPT_PATH = (
    Path(__file__).resolve().parent.parent
    / "src"
    / "safespect"
    / "data"
    / "scripts"
    / "short_a_perfect.script.jsonl"
)

IDLE = InputFrame()


@pytest.fixture(scope="module")
def spec():
    return build_stock("short_a")


@pytest.fixture(scope="module")
def perfect_frames():
    _, frames = parse_script(SCRIPT_PATH.read_text())
    return frames


@pytest.fixture(scope="module")
def perfect_run(spec, perfect_frames):
    return run_script(spec, hud.ADAPT_AR, perfect_frames)


class TestBasics:
    def test_starts_grounded_at_home(self, spec):
        session = Session(spec)
        assert session.drone.pos_true == spec.home_point_m
        assert not session.drone.airborne

    def test_takeoff_button(self, spec):
        session = Session(spec)
        result = session.tick(InputFrame(takeoff=True))
        assert "takeoff" in result.events
        assert session.drone.airborne
        assert session.drone.pos_true[2] > 0.0

    def test_idle_ticks_do_not_move_the_drone(self, spec):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        p = session.drone.pos_true
        for _ in range(100):
            session.tick(IDLE)
        assert session.drone.pos_true == p

    def test_unknown_mode_rejected(self, spec):
        with pytest.raises(ValueError):
            Session(spec, mode="hologram")

    def test_tick_after_end_raises(self, spec, perfect_frames):
        session = run_script(spec, hud.ADAPT_AR, perfect_frames)
        assert session.ended
        with pytest.raises(RuntimeError):
            session.tick(IDLE)


class TestAutopilotFlow:
    def test_toggle_refused_far_from_path(self, spec):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        result = session.tick(InputFrame(autopilot_toggle=True))
        assert "autopilot_refused" in result.events
        assert not session.ap_state.engaged

    def test_perfect_script_engages_and_completes(self, perfect_run):
        flat = [e for r in perfect_run.log.records for e in r.events]
        assert "autopilot_engaged" in flat
        assert "mission_complete" in flat
        assert perfect_run.mission_complete

    def test_manual_stick_disengages(self, spec, perfect_frames):
        # find the engage tick, then push a stick the following tick
        session = Session(spec)
        engage_tick = None
        for i, f in enumerate(perfect_frames):
            result = session.tick(f)
            if "autopilot_engaged" in result.events:
                engage_tick = i
                break
        assert engage_tick is not None
        result = session.tick(InputFrame(axes=(0.9, 0.0, 0.0, 0.0)))
        assert "autopilot_disengaged:manual_input" in result.events
        assert session.drone.control_mode == fs.MANUAL


class TestRth:
    def test_rth_lands_at_home(self, spec):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        result = session.tick(InputFrame(rth=True))
        assert "rth_engaged" in result.events
        for _ in range(3000):
            result = session.tick(IDLE)
            if result.ended:
                break
        assert session.end_reason == "landed"
        assert vdist(session.drone.pos_true, spec.home_point_m) < 1.0


class TestViewMachineIntegration:
    def test_pre_mission_until_boundary(self, spec, perfect_frames):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        assert session.view.phase == hud.PRE_MISSION
        assert not session.entered_boundary

    def test_mission_phase_while_engaged(self, perfect_run):
        phases = [r.view["phase"] for r in perfect_run.log.records]
        assert hud.MISSION in phases

    def test_safety_phase_on_manual_flight(self, spec):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        # fly toward the facade until inside the boundary
        for _ in range(1500):
            session.tick(InputFrame(axes=(0.0, 0.0, 0.0, 0.5)))
            if session.entered_boundary:
                break
        # entering the boundary while under manual control lands in safety view
        session.tick(IDLE)
        if session.entered_boundary:
            assert session.view.phase == hud.SAFETY
            assert "manual_control" in session.view.active_issues


class TestMetrics:
    def test_perfect_flight_report(self, perfect_run):
        m = perfect_run.metrics()
        assert m["marked_pct"] == 100.0
        assert m["false_marks"] == 0
        assert m["coverage_pct"] == 100.0
        assert m["mission_complete"]
        assert m["end_reason"] == "landed"
        assert m["deviation_m"] < 1.0
        assert not m["partial"]

    def test_partial_without_track(self, spec):
        session = Session(spec)
        session.tick(IDLE)
        m = session.metrics()
        assert m["partial"] and m["deviation_m"] is None


class TestDeterminismAndReplay:
    def test_identical_runs_identical_hashes(self, spec, perfect_frames):
        a = run_script(spec, hud.ADAPT_AR, perfect_frames)
        b = run_script(spec, hud.ADAPT_AR, perfect_frames)
        assert a.telemetry_hash() == b.telemetry_hash()

    def test_replay_reproduces_log(self, perfect_run):
        text = serialize_log(perfect_run.log)
        session, recorded_hash, divergent = replay_log(text)
        assert divergent is None
        assert session.telemetry_hash() == recorded_hash == perfect_run.telemetry_hash()

    def test_replay_flags_tampered_input(self, perfect_run):
        text = serialize_log(perfect_run.log)
        lines = text.splitlines()
        # give the pilot a hard stick push mid-flight (tick 2999 is line 3000+header)
        rec = json.loads(lines[3000])
        rec["input"]["axes"][0] = 0.9
        lines[3000] = canonical_line(rec)
        _, _, divergent = replay_log("\n".join(lines) + "\n")
        assert divergent == 2999

    def test_replay_rejects_tampered_scenario(self, perfect_run):
        text = serialize_log(perfect_run.log)
        lines = text.splitlines()
        header = json.loads(lines[0])
        header["scenario_doc"] = header["scenario_doc"].replace('"seed": 11', '"seed": 12')
        header["seed"] = 12
        lines[0] = canonical_line(header)
        with pytest.raises(ScenarioMismatch):
            replay_log("\n".join(lines) + "\n")

    def test_different_seed_different_trace(self, spec, perfect_frames):
        from dataclasses import replace

        other = replace(spec, seed=99)
        a = run_script(spec, hud.ADAPT_AR, perfect_frames[:2000])
        b = run_script(other, hud.ADAPT_AR, perfect_frames[:2000])
        assert a.telemetry_hash() != b.telemetry_hash()


class TestBatteryEnd:
    def test_hover_until_depleted(self, spec):
        session = Session(spec)
        session.tick(InputFrame(takeoff=True))
        result = None
        for _ in range(int(spec.battery_full_duration_s * 50) + 100):
            result = session.tick(IDLE)
            if result.ended:
                break
        assert session.end_reason == "battery_depleted"
        assert "battery_depleted" in result.events
        flat = [e for r in session.log.records for e in r.events]
        assert "battery_low" in flat and "battery_critical" in flat
