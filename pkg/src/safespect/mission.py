"""Defect marking, coverage tracking, and the mission metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .autopilot import AutopilotState, PathPlan
from .engine import EngineConfig
from .flightsim import DroneState
from .geometry import Vec3, point_segment_distance, vadd, vdist, vscale, vsub, vunit
from .scenario import ScenarioSpec, facade_frame, world_to_facade


class RangeError(ValueError):
    """A questionnaire item is outside its 1-7 scale."""


class EmptyTrack(ValueError):
    """The flight track has fewer than two points."""


@dataclass(frozen=True)
class Mark:
    time_s: float
    camera_pixel: tuple[float, float]
    hit_uv: tuple[float, float] | None = None
    hit_world: Vec3 | None = None
    matched_defect: int | None = None


@dataclass(frozen=True)
class CoverageMap:
    covered: tuple[bool, ...]
    dwell: tuple[float, ...]  # contiguous seconds spent near each waypoint

    @classmethod
    def empty(cls, n: int) -> "CoverageMap":
        return cls(covered=(False,) * n, dwell=(0.0,) * n)

    @property
    def fraction(self) -> float:
        if not self.covered:
            return 1.0
        return sum(self.covered) / len(self.covered)


@dataclass(frozen=True)
class SartInputs:
    demand: tuple[int, int, int]
    supply: tuple[int, int, int, int]
    understanding: tuple[int, int, int]


# --- camera model -------------------------------------------------------


def camera_axes(yaw: float) -> tuple[Vec3, Vec3, Vec3]:
    """Forward, right, up axes of the pinhole camera (0 deg gimbal pitch)."""
    forward = (math.cos(yaw), math.sin(yaw), 0.0)
    right = (math.sin(yaw), -math.cos(yaw), 0.0)
    up = (0.0, 0.0, 1.0)
    return forward, right, up


def pixel_ray(s: DroneState, pixel: tuple[float, float], cfg: EngineConfig) -> tuple[Vec3, Vec3]:
    """Ray origin/direction through a normalized pixel; (0,0) top-left."""
    forward, right, up = camera_axes(s.yaw)
    tan_h = math.tan(cfg.camera_hfov_rad / 2.0)
    tan_v = tan_h / cfg.camera_aspect
    x = (pixel[0] * 2.0 - 1.0) * tan_h
    y = (1.0 - pixel[1] * 2.0) * tan_v
    direction = vunit(vadd(vadd(forward, vscale(right, x)), vscale(up, y)))
    return s.pos_true, direction


def project_to_pixel(s: DroneState, point: Vec3, cfg: EngineConfig) -> tuple[float, float] | None:
    """Inverse of pixel_ray: normalized pixel of a world point, or None if
    the point is behind the camera."""
    forward, right, up = camera_axes(s.yaw)
    d = vsub(point, s.pos_true)
    depth = sum(d[i] * forward[i] for i in range(3))
    if depth <= 1e-9:
        return None
    tan_h = math.tan(cfg.camera_hfov_rad / 2.0)
    tan_v = tan_h / cfg.camera_aspect
    x = sum(d[i] * right[i] for i in range(3)) / depth / tan_h
    y = sum(d[i] * up[i] for i in range(3)) / depth / tan_v
    return ((x + 1.0) / 2.0, (1.0 - y) / 2.0)


def mark_defect(
    s: DroneState,
    pixel: tuple[float, float],
    spec: ScenarioSpec,
    cfg: EngineConfig,
    time_s: float = 0.0,
) -> Mark:
    """Cast the camera ray through a clicked pixel; on a facade hit, match
    the nearest defect whose radius covers the hit point."""
    origin, direction = pixel_ray(s, pixel, cfg)
    fr = facade_frame(spec)
    denom = sum(direction[i] * fr.outward[i] for i in range(3))
    if abs(denom) < 1e-12:
        return Mark(time_s=time_s, camera_pixel=pixel)
    # signed outward distance of the origin from the facade plane
    rel = vsub(origin, fr.origin)
    dist_out = sum(rel[i] * fr.outward[i] for i in range(3))
    t = -dist_out / denom
    if t <= 0.0:
        return Mark(time_s=time_s, camera_pixel=pixel)
    hit = vadd(origin, vscale(direction, t))
    u, v, _ = world_to_facade(spec, hit)
    if not (0.0 <= u <= fr.width and 0.0 <= v <= fr.height):
        return Mark(time_s=time_s, camera_pixel=pixel)

    best_id, best_d = None, math.inf
    for i, d in enumerate(spec.defects):
        dd = math.hypot(u - d.center_uv_m[0], v - d.center_uv_m[1])
        if dd <= d.radius_m and dd < best_d:
            best_id, best_d = i, dd
    return Mark(time_s=time_s, camera_pixel=pixel, hit_uv=(u, v), hit_world=hit, matched_defect=best_id)


# --- scoring ------------------------------------------------------------


def score_marks(marks: list[Mark], spec: ScenarioSpec) -> dict:
    matched = {m.matched_defect for m in marks if m.matched_defect is not None}
    false_marks = sum(1 for m in marks if m.matched_defect is None)
    total = len(spec.defects)
    pct = 100.0 * len(matched) / total if total else 0.0
    return {"marked_pct": pct, "false_marks": false_marks, "matched": len(matched), "total_defects": total}


def update_coverage(
    c: CoverageMap,
    s: DroneState,
    a: AutopilotState,
    plan: PathPlan,
    cfg: EngineConfig,
    dt: float,
    pause_completed: list[int] = (),
) -> CoverageMap:
    """A waypoint is covered when an autopilot pause completes there, or when
    a manual hover stays within hold_radius for hold_time contiguous seconds."""
    covered = list(c.covered)
    dwell = list(c.dwell)
    for i in pause_completed:
        covered[i] = True
    if not a.engaged:
        for i, wp in enumerate(plan.waypoints):
            if vdist(s.pos_true, wp.pos) <= cfg.hold_radius:
                dwell[i] += dt
                if dwell[i] >= cfg.hold_time_s:
                    covered[i] = True
            else:
                dwell[i] = 0.0
    return CoverageMap(covered=tuple(covered), dwell=tuple(dwell))


def path_deviation(plan: PathPlan, track: list[Vec3]) -> float:
    """Mean over waypoints of the minimum distance from the waypoint to the
    flown polyline (point-to-segment)."""
    if len(track) < 2:
        raise EmptyTrack("track needs at least 2 points")
    total = 0.0
    for wp in plan.waypoints:
        best = math.inf
        p = wp.pos
        for a, b in zip(track, track[1:]):
            d = point_segment_distance(p, a, b)
            if d < best:
                best = d
        total += best
    return total / len(plan.waypoints)


def sart_score(inputs: SartInputs) -> int:
    """Situation awareness = understanding - (demand - supply)."""
    for group in (inputs.demand, inputs.supply, inputs.understanding):
        for item in group:
            if not 1 <= item <= 7:
                raise RangeError(f"questionnaire item {item} outside [1, 7]")
    d = sum(inputs.demand)
    s = sum(inputs.supply)
    u = sum(inputs.understanding)
    return u - (d - s)
