"""Facade inspection path generation and the autopilot that flies it.

The path is a serpentine sweep: one row per layer at the layer's mid-height,
columns spanning the facade width, alternating direction row to row, all at
the scenario standoff distance from the facade plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .engine import EngineConfig
from .flightsim import AUTOPILOT, CRITICAL, WARN, DroneState, BatteryModel, VelocityCommand, required_rth_fraction
from .geometry import Vec3, vdist, vscale, vsub, vunit, wrap_angle
from .scenario import GeometryError, ScenarioSpec, facade_frame, facade_to_world, mission_boundary


@dataclass(frozen=True)
class Waypoint:
    pos: Vec3
    layer: int
    facade_uv: tuple[float, float]


@dataclass(frozen=True)
class PathPlan:
    waypoints: tuple[Waypoint, ...]
    cruise_speed: float
    pause_duration: float
    standoff: float


CRUISING, PAUSING = "cruising", "pausing"


@dataclass(frozen=True)
class AutopilotState:
    engaged: bool = False
    current_index: int = 0
    phase: str = CRUISING
    pause_remaining: float = 0.0


def generate_path(spec: ScenarioSpec, cfg: EngineConfig) -> PathPlan:
    """Rows at (j + 0.5) * height / layers, columns spaced at most
    `column_spacing` with endpoints on the facade edges, serpentine order."""
    fr = facade_frame(spec)
    n_cols = math.ceil(fr.width / cfg.column_spacing) + 1
    us = [fr.width * i / (n_cols - 1) for i in range(n_cols)] if n_cols > 1 else [fr.width / 2.0]

    boundary = mission_boundary(spec)
    waypoints: list[Waypoint] = []
    for j in range(spec.layers):
        v = (j + 0.5) * fr.height / spec.layers
        row = us if j % 2 == 0 else list(reversed(us))
        for u in row:
            pos = facade_to_world(spec, u, v, spec.standoff_distance_m)
            if not boundary.contains(pos):
                raise GeometryError(
                    f"waypoint at layer {j}, u={u:.2f} lies outside the mission boundary"
                )
            waypoints.append(Waypoint(pos=pos, layer=j, facade_uv=(u, v)))
    return PathPlan(
        waypoints=tuple(waypoints),
        cruise_speed=cfg.cruise_speed,
        pause_duration=cfg.pause_duration_s,
        standoff=spec.standoff_distance_m,
    )


def nearest_waypoint(s: DroneState, plan: PathPlan) -> tuple[int, float]:
    """Index and distance of the waypoint closest to the position estimate;
    ties break to the lower index."""
    best_i, best_d = 0, math.inf
    for i, wp in enumerate(plan.waypoints):
        d = vdist(s.pos_est, wp.pos)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


def can_engage(
    s: DroneState,
    plan: PathPlan,
    m: BatteryModel,
    home: Vec3,
    cfg: EngineConfig,
) -> bool:
    if not s.airborne:
        return False
    _, d = nearest_waypoint(s, plan)
    if d >= cfg.engage_radius:
        return False
    if s.gps_lost:
        return False
    if CRITICAL in s.collision.levels:
        return False
    return s.battery > required_rth_fraction(s, m, home)


def engage(s: DroneState, plan: PathPlan) -> AutopilotState:
    """Snap the route to the nearest waypoint and start cruising toward it."""
    index, _ = nearest_waypoint(s, plan)
    return AutopilotState(engaged=True, current_index=index, phase=CRUISING, pause_remaining=0.0)


def _facing_yaw(spec: ScenarioSpec) -> float:
    out = facade_frame(spec).outward
    return math.atan2(-out[1], -out[0])


def autopilot_command(
    a: AutopilotState,
    s: DroneState,
    plan: PathPlan,
    spec: ScenarioSpec,
    cfg: EngineConfig,
    dt: float,
) -> tuple[VelocityCommand, AutopilotState, list[str]]:
    """One tick of the engaged autopilot: constant-speed legs, fixed pauses,
    camera held facing the facade. Emits waypoint/mission events."""
    assert a.engaged
    events: list[str] = []
    target = plan.waypoints[a.current_index].pos

    yaw_err = wrap_angle(_facing_yaw(spec) - s.yaw)
    yaw_rate = max(-cfg.max_yaw_rate, min(cfg.max_yaw_rate, cfg.yaw_gain * yaw_err))

    if a.phase == PAUSING:
        remaining = a.pause_remaining - dt
        if remaining <= 0.0:
            events.append(f"waypoint_covered:{a.current_index}")
            if a.current_index + 1 >= len(plan.waypoints):
                events.append("mission_complete")
                return VelocityCommand(yaw_rate=yaw_rate), replace(a, engaged=False, pause_remaining=0.0), events
            a = replace(a, current_index=a.current_index + 1, phase=CRUISING, pause_remaining=0.0)
            target = plan.waypoints[a.current_index].pos
        else:
            return VelocityCommand(yaw_rate=yaw_rate), replace(a, pause_remaining=remaining), events

    distance = vdist(s.pos_true, target)
    if distance <= cfg.arrival_radius:
        events.append(f"waypoint_reached:{a.current_index}")
        return (
            VelocityCommand(yaw_rate=yaw_rate),
            replace(a, phase=PAUSING, pause_remaining=plan.pause_duration),
            events,
        )

    direction = vunit(vsub(target, s.pos_true))
    return VelocityCommand(velocity=vscale(direction, plan.cruise_speed), yaw_rate=yaw_rate), a, events


DISENGAGE_CAUSES = ("manual_input", "gps_lost", "collision_warn", "battery_low")


def apply_interrupts(
    a: AutopilotState,
    s: DroneState,
    axes: tuple[float, float, float, float],
    m: BatteryModel,
    home: Vec3,
    cfg: EngineConfig,
) -> tuple[AutopilotState, list[str]]:
    """Disengage on manual input, GPS loss, any warn-or-worse proximity
    reading, or insufficient battery for the dynamic return-home budget."""
    if not a.engaged:
        return a, []
    cause = None
    if any(abs(x) > cfg.stick_deadzone for x in axes):
        cause = "manual_input"
    elif s.gps_lost:
        cause = "gps_lost"
    elif s.collision.worst in (WARN, CRITICAL):
        cause = "collision_warn"
    elif s.battery < max(m.low_threshold, required_rth_fraction(s, m, home)):
        cause = "battery_low"
    if cause is None:
        return a, []
    return replace(a, engaged=False), [f"autopilot_disengaged:{cause}"]
