"""Adaptive interface brain: the mission/safety view state machine and the
declarative HUD frame composed for each interface mode.

Frames are plain data; the cockpit renders them verbatim (schema in
docs/hud-frames.md, golden fixtures under fixtures/hud/).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .autopilot import AutopilotState, PathPlan, nearest_waypoint
from .engine import EngineConfig
from .flightsim import (
    AUTOPILOT,
    CRITICAL,
    SECTOR_COUNT,
    WARN,
    BatteryModel,
    DroneState,
    required_rth_fraction,
)
from .geometry import Vec3, vdist, vnorm, vsub
from .scenario import ScenarioSpec, mission_boundary

HUD_SCHEMA_VERSION = 1

PRE_MISSION, MISSION, SAFETY = "pre_mission", "mission", "safety"

ISSUE_KINDS = ("gps_lost", "collision", "battery_low", "manual_control")

TWOD_ONLY, FULL_AR, ADAPT_AR = "twod_only", "full_ar", "adapt_ar"
INTERFACE_MODES = (TWOD_ONLY, FULL_AR, ADAPT_AR)

HAND_FIXED, HEAD_LOCKED, BODY_LOCKED = "hand_fixed", "head_locked", "body_locked"

SAFETY_ONLY_KINDS = frozenset(
    {"locator_ring", "heading_arrow", "uncertainty_disc", "rth_path", "ground_projection"}
)

STATUS_TEXT = {
    "gps_lost": "GPS SIGNAL LOST",
    "battery_low": "BATTERY LOW - RETURN TO HOME",
    "collision": "OBSTACLE PROXIMITY",
    "manual_control": "MANUAL CONTROL",
    "autopilot_on": "AUTOPILOT ENGAGED",
    "autopilot_off": "AUTOPILOT OFF",
    "mission_complete": "MISSION COMPLETE",
}

WHITE = (1.0, 1.0, 1.0, 1.0)
GREEN = (0.2, 0.9, 0.3, 0.35)
BLUE = (0.25, 0.5, 1.0, 0.9)
YELLOW = (1.0, 0.85, 0.1, 0.9)
RED = (1.0, 0.2, 0.15, 0.95)


@dataclass(frozen=True)
class ViewState:
    phase: str = PRE_MISSION
    active_issues: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Ray:
    origin: Vec3 = (0.0, 0.0, 1.7)
    direction: Vec3 = (0.0, 1.0, 0.0)


@dataclass(frozen=True)
class HudElement:
    kind: str
    pose: Vec3
    scale: float = 1.0
    color: tuple[float, float, float, float] = WHITE
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PanelState:
    anchor: str
    alpha: float


@dataclass(frozen=True)
class HudFrame:
    elements: tuple[HudElement, ...]
    panel: PanelState
    view: ViewState


# --- view state machine -------------------------------------------------


def transition_view(
    v: ViewState,
    issues: frozenset[str],
    autopilot_clicked: bool,
    can_engage_now: bool = True,
    in_boundary: bool = True,
) -> ViewState:
    """Advance the mission/safety state machine one tick.

    `issues` is the set of currently-active safety issues; the mission view
    is reachable only through the autopilot button with no blocking issues.
    """
    if v.phase == PRE_MISSION and not in_boundary:
        return ViewState(phase=PRE_MISSION, active_issues=issues)
    blocking = issues - {"manual_control"}
    if autopilot_clicked and not blocking and can_engage_now:
        return ViewState(phase=MISSION, active_issues=frozenset())
    if v.phase == MISSION and not issues:
        return ViewState(phase=MISSION, active_issues=frozenset())
    return ViewState(phase=SAFETY, active_issues=issues)


# --- scalar display rules ----------------------------------------------


def ring_scale(distance_to_viewer: float) -> float:
    """Locator-ring scale: constant within 25 m, proportional beyond."""
    return max(1.0, distance_to_viewer * 0.04)


def rth_bar_segments(
    battery: float, m: BatteryModel, rth_needed: float
) -> tuple[float, float, float]:
    """(green, yellow, red) visible fractions of the return-home path,
    ordered from the home point outward; they always sum to 1."""
    low_start = max(m.low_threshold, rth_needed)
    denom = low_start - m.critical_threshold
    yellow_raw = 0.0 if denom <= 0 else (low_start - battery) / denom
    yellow_raw = min(1.0, max(0.0, yellow_raw))
    red_denom = m.critical_threshold - m.land_floor
    red_raw = 0.0 if red_denom <= 0 else (m.critical_threshold - battery) / red_denom
    red_raw = min(1.0, max(0.0, red_raw))
    covered = max(yellow_raw, red_raw)
    return (1.0 - covered, covered - red_raw, red_raw)


def panel_alpha(gaze_angle: float, cfg: EngineConfig | None = None) -> float:
    """Gaze-driven panel transparency: opaque near the view center, linear
    falloff to a floor away from it."""
    cfg = cfg or EngineConfig()
    if gaze_angle <= cfg.gaze_full_angle:
        return 1.0
    if gaze_angle >= cfg.gaze_faded_angle:
        return cfg.panel_min_alpha
    t = (gaze_angle - cfg.gaze_full_angle) / (cfg.gaze_faded_angle - cfg.gaze_full_angle)
    return 1.0 + t * (cfg.panel_min_alpha - 1.0)


def uncertainty_alpha(radius: float) -> float:
    # strictly decreasing in the uncertainty radius
    return 0.9 * math.exp(-0.8 * radius)


# --- frame composition --------------------------------------------------


def _boundary_element(spec: ScenarioSpec) -> HudElement:
    box = mission_boundary(spec)
    center = tuple((box.lo[i] + box.hi[i]) / 2.0 for i in range(3))
    return HudElement(
        kind="boundary_box",
        pose=center,
        color=GREEN,
        payload={"size": [box.hi[i] - box.lo[i] for i in range(3)]},
    )


def _waypoint_element(plan: PathPlan, index: int, role: str) -> HudElement:
    wp = plan.waypoints[index]
    return HudElement(kind="waypoint", pose=wp.pos, color=BLUE, payload={"index": index, "role": role})


def _path_element(plan: PathPlan) -> HudElement:
    return HudElement(
        kind="path_line",
        pose=plan.waypoints[0].pos,
        color=BLUE,
        payload={"points": [list(w.pos) for w in plan.waypoints]},
    )


def _safety_elements(
    s: DroneState,
    plan: PathPlan,
    spec: ScenarioSpec,
    m: BatteryModel,
    cfg: EngineConfig,
    issues: frozenset[str],
    gaze: Ray,
) -> list[HudElement]:
    out: list[HudElement] = []
    scale = ring_scale(vdist(s.pos_est, gaze.origin))
    out.append(HudElement(kind="locator_ring", pose=s.pos_est, scale=scale, color=WHITE))
    out.append(
        HudElement(kind="heading_arrow", pose=s.pos_est, scale=scale, color=RED, payload={"yaw": s.yaw})
    )
    for i in range(SECTOR_COUNT):
        level = s.collision.levels[i]
        if level in (WARN, CRITICAL):
            out.append(
                HudElement(
                    kind="collision_arc",
                    pose=s.pos_est,
                    scale=scale,
                    color=RED if level == CRITICAL else YELLOW,
                    payload={"sector": i, "distance": s.collision.distances[i], "level": level},
                )
            )
    ground = (s.pos_est[0], s.pos_est[1], 0.0)
    out.append(
        HudElement(kind="ground_projection", pose=ground, color=BLUE, payload={"altitude": s.pos_est[2]})
    )
    out.append(
        HudElement(
            kind="uncertainty_disc",
            pose=ground,
            scale=max(s.uncertainty_radius, 0.1),
            color=(BLUE[0], BLUE[1], BLUE[2], uncertainty_alpha(s.uncertainty_radius)),
        )
    )
    if "battery_low" in issues:
        rth_needed = required_rth_fraction(s, m, spec.home_point_m)
        green, yellow, red = rth_bar_segments(s.battery, m, rth_needed)
        out.append(
            HudElement(
                kind="rth_path",
                pose=s.pos_est,
                color=GREEN,
                payload={
                    "home": list(spec.home_point_m),
                    "green": green,
                    "yellow": yellow,
                    "red": red,
                },
            )
        )
    nearest, _ = nearest_waypoint(s, plan)
    out.append(_waypoint_element(plan, nearest, "nearest"))
    return out


def _coverage_elements(plan: PathPlan, covered: tuple[bool, ...] | None) -> list[HudElement]:
    if not covered:
        return []
    out = []
    for i, flag in enumerate(covered):
        if flag:
            wp = plan.waypoints[i]
            out.append(
                HudElement(kind="coverage_patch", pose=wp.pos, color=GREEN, payload={"index": i})
            )
    return out


def _mark_elements(marks) -> list[HudElement]:
    out = []
    for i, mk in enumerate(marks):
        if mk.hit_world is not None:
            out.append(HudElement(kind="defect_mark", pose=mk.hit_world, color=RED, payload={"index": i}))
    return out


def _status_elements(texts: list[str], anchor_pose: Vec3) -> list[HudElement]:
    return [
        HudElement(kind="status_message", pose=anchor_pose, payload={"text": STATUS_TEXT[t], "code": t})
        for t in texts
    ]


def compose_hud_frame(
    mode: str,
    v: ViewState,
    s: DroneState,
    a: AutopilotState,
    plan: PathPlan,
    spec: ScenarioSpec,
    gaze: Ray,
    m: BatteryModel | None = None,
    cfg: EngineConfig | None = None,
    covered: tuple[bool, ...] | None = None,
    marks=(),
) -> HudFrame:
    """Pure composition of the per-tick HUD frame for one interface mode."""
    cfg = cfg or EngineConfig()
    m = m or BatteryModel(full_duration_s=spec.battery_full_duration_s)
    elements: list[HudElement] = []

    status_codes = sorted(v.active_issues)
    if a.engaged:
        status_codes = ["autopilot_on"] + status_codes

    if mode == TWOD_ONLY:
        return HudFrame(elements=(), panel=PanelState(anchor=HAND_FIXED, alpha=1.0), view=v)

    if mode == FULL_AR:
        elements.append(_boundary_element(spec))
        elements.append(_path_element(plan))
        for i in range(len(plan.waypoints)):
            elements.append(_waypoint_element(plan, i, "all"))
        elements.extend(_coverage_elements(plan, covered))
        elements.extend(_safety_elements(s, plan, spec, m, cfg, frozenset({"battery_low"}), gaze))
        elements.extend(_mark_elements(marks))
        elements.extend(_status_elements(status_codes, s.pos_est))
        panel = PanelState(anchor=HEAD_LOCKED, alpha=1.0)
        return HudFrame(elements=_ordered(elements), panel=panel, view=v)

    # adaptive mode
    if v.phase == PRE_MISSION:
        elements.append(_boundary_element(spec))
        elements.append(_path_element(plan))
        for i in range(len(plan.waypoints)):
            elements.append(_waypoint_element(plan, i, "all"))
        panel = PanelState(anchor=HEAD_LOCKED, alpha=1.0)
    elif v.phase == MISSION:
        elements.append(_path_element(plan))
        if a.engaged:
            elements.append(_waypoint_element(plan, a.current_index, "next"))
        elements.extend(_coverage_elements(plan, covered))
        elements.extend(_mark_elements(marks))
        elements.extend(_status_elements(status_codes, s.pos_est))
        panel = PanelState(anchor=HEAD_LOCKED, alpha=1.0)
    else:  # safety view
        elements.extend(_safety_elements(s, plan, spec, m, cfg, v.active_issues, gaze))
        elements.extend(_status_elements(status_codes, s.pos_est))
        angle = _gaze_angle(gaze, s.pos_est)
        panel = PanelState(anchor=BODY_LOCKED, alpha=panel_alpha(angle, cfg))
    return HudFrame(elements=_ordered(elements), panel=panel, view=v)


def _gaze_angle(gaze: Ray, panel_center: Vec3) -> float:
    to_panel = vsub(panel_center, gaze.origin)
    n1, n2 = vnorm(gaze.direction), vnorm(to_panel)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    cosang = sum(gaze.direction[i] * to_panel[i] for i in range(3)) / (n1 * n2)
    return math.acos(min(1.0, max(-1.0, cosang)))


def _ordered(elements: list[HudElement]) -> tuple[HudElement, ...]:
    # bit-stable ordering: by kind, then payload index where present
    return tuple(sorted(elements, key=lambda e: (e.kind, e.payload.get("index", -1), e.payload.get("sector", -1), e.payload.get("code", ""))))


# --- serialization ------------------------------------------------------


def frame_to_dict(frame: HudFrame) -> dict:
    return {
        "schema_version": HUD_SCHEMA_VERSION,
        "view": {"phase": frame.view.phase, "active_issues": sorted(frame.view.active_issues)},
        "panel": {"anchor": frame.panel.anchor, "alpha": frame.panel.alpha},
        "elements": [
            {
                "kind": e.kind,
                "pose": list(e.pose),
                "scale": e.scale,
                "color": list(e.color),
                "payload": e.payload,
            }
            for e in frame.elements
        ],
    }
