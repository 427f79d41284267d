"""Fixed nominal states used to freeze golden HUD frames (fixtures/hud/).

The cockpit's overlay renderer is checked against these files element by
element, so regenerating them is a schema change: bump HUD_SCHEMA_VERSION.
"""

from __future__ import annotations

from dataclasses import replace

from . import hud
from .autopilot import AutopilotState, generate_path
from .engine import EngineConfig
from .flightsim import CollisionReadings, DroneState, battery_model
from .mission import Mark
from .stock import build_stock


def nominal_frames() -> dict[str, hud.HudFrame]:
    spec = build_stock("short_a")
    cfg = EngineConfig()
    plan = generate_path(spec, cfg)
    m = battery_model(spec, cfg)
    gaze = hud.Ray(origin=(10.0, -20.0, 1.7), direction=(0.0, 1.0, 0.0))

    drone = DroneState(
        pos_true=(5.0, -7.0, 10.0),
        pos_est=(5.0, -7.0, 10.0),
        vel=(2.0, 0.0, 0.0),
        yaw=1.5707963267948966,
        battery=0.6,
        airborne=True,
        control_mode="autopilot",
    )
    engaged = AutopilotState(engaged=True, current_index=8, phase="cruising")
    covered = tuple(i < 8 for i in range(len(plan.waypoints)))
    marks = [Mark(time_s=30.0, camera_pixel=(0.5, 0.5), hit_uv=(5.0, 10.0), hit_world=(5.0, 0.0, 10.0), matched_defect=0)]

    mission_view = hud.ViewState(phase=hud.MISSION)
    safety_drone = replace(
        drone,
        control_mode="manual",
        gps_lost=True,
        gps_signal=0.2,
        uncertainty_radius=1.5,
        battery=0.2,
        collision=CollisionReadings(
            distances=(4.0,) + (float("inf"),) * 9,
            levels=("warn",) + ("clear",) * 9,
        ),
    )
    safety_view = hud.ViewState(
        phase=hud.SAFETY, active_issues=frozenset({"gps_lost", "collision", "battery_low", "manual_control"})
    )
    idle = AutopilotState()

    return {
        "twod_only": hud.compose_hud_frame(
            hud.TWOD_ONLY, safety_view, safety_drone, idle, plan, spec, gaze, m=m, cfg=cfg
        ),
        "pre_mission": hud.compose_hud_frame(
            hud.ADAPT_AR, hud.ViewState(phase=hud.PRE_MISSION), replace(drone, airborne=False), idle, plan, spec, gaze, m=m, cfg=cfg
        ),
        "adapt_mission": hud.compose_hud_frame(
            hud.ADAPT_AR, mission_view, drone, engaged, plan, spec, gaze, m=m, cfg=cfg, covered=covered, marks=marks
        ),
        "adapt_safety": hud.compose_hud_frame(
            hud.ADAPT_AR, safety_view, safety_drone, idle, plan, spec, gaze, m=m, cfg=cfg, covered=covered, marks=marks
        ),
        "full_ar": hud.compose_hud_frame(
            hud.FULL_AR, mission_view, drone, engaged, plan, spec, gaze, m=m, cfg=cfg, covered=covered, marks=marks
        ),
    }
