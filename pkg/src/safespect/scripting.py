"""Closed-loop flight bot that records a per-tick input script.

The bot flies a session live (takeoff, approach the first waypoint, engage
the autopilot, mark every defect that enters the camera frame, then return
home) while recording the InputFrames it produced. Because the simulation is
deterministic, the recorded script replays to the identical flight.
"""

from __future__ import annotations

import math
from dataclasses import replace

from . import flightsim as fs
from . import mission as ms
from .autopilot import _facing_yaw, nearest_waypoint
from .engine import EngineConfig
from .geometry import vdist, wrap_angle
from .scenario import ScenarioSpec
from .session import Session
from .telemetry import InputFrame


def _approach_axes(session: Session, target, cfg: EngineConfig) -> tuple[float, float, float, float]:
    """P-control toward a point, expressed as stick axes (body frame)."""
    s = session.drone
    err = (target[0] - s.pos_true[0], target[1] - s.pos_true[1], target[2] - s.pos_true[2])
    forward, right, _ = ms.camera_axes(s.yaw)
    f_err = err[0] * forward[0] + err[1] * forward[1]
    r_err = err[0] * right[0] + err[1] * right[1]
    gain = 0.8
    a0 = max(-0.6, min(0.6, gain * f_err / cfg.max_horizontal_speed))
    a1 = max(-0.6, min(0.6, gain * r_err / cfg.max_horizontal_speed))
    a2 = max(-0.8, min(0.8, gain * err[2] / cfg.max_vertical_speed))
    yaw_err = wrap_angle(_facing_yaw(session.spec) - s.yaw)
    a3 = max(-0.8, min(0.8, 1.5 * yaw_err / cfg.max_yaw_rate))

    # the session ignores sub-deadzone axes, so bump small corrections past it
    def dz(a: float) -> float:
        if a == 0.0:
            return 0.0
        floor = cfg.stick_deadzone + 0.03
        return math.copysign(max(abs(a), floor), a) if abs(a) > 0.01 else 0.0

    return (dz(a0), dz(a1), dz(a2), dz(a3))


def _visible_unmarked_defect(session: Session, marked: set[int], cfg: EngineConfig):
    """Pixel of one unmarked defect currently well inside the camera frame."""
    from .scenario import facade_to_world

    s = session.drone
    for i, d in enumerate(session.spec.defects):
        if i in marked:
            continue
        world = facade_to_world(session.spec, d.center_uv_m[0], d.center_uv_m[1])
        pixel = ms.project_to_pixel(s, world, cfg)
        if pixel is None:
            continue
        if 0.06 <= pixel[0] <= 0.94 and 0.06 <= pixel[1] <= 0.94:
            return i, pixel
    return None


def record_autopilot_flight(
    spec: ScenarioSpec,
    mode: str = "adapt_ar",
    cfg: EngineConfig | None = None,
    max_ticks: int = 60_000,
) -> list[InputFrame]:
    """Produce an input script that completes the inspection mission."""
    cfg = cfg or EngineConfig()
    session = Session(spec, mode, cfg)
    frames: list[InputFrame] = []
    marked: set[int] = set()
    phase = "takeoff"
    rth_sent = False

    for _ in range(max_ticks):
        s = session.drone
        inp = InputFrame()

        if phase == "takeoff":
            inp = InputFrame(takeoff=True)
            phase = "approach"
        elif phase == "approach":
            target = session.plan.waypoints[0].pos
            axes = _approach_axes(session, target, cfg)
            yaw_ok = abs(wrap_angle(_facing_yaw(spec) - s.yaw)) < 0.2
            if vdist(s.pos_true, target) < 1.5 and yaw_ok and not s.gps_lost:
                inp = InputFrame(autopilot_toggle=True)
                phase = "autopilot"
            else:
                inp = InputFrame(axes=axes)
        elif phase == "autopilot":
            if session.mission_complete:
                phase = "rth"
            elif not session.ap_state.engaged and session.tick_index > 0:
                # interrupted; hold position and retry once conditions clear
                inp = InputFrame(autopilot_toggle=True)
            else:
                found = _visible_unmarked_defect(session, marked, cfg)
                if found is not None:
                    idx, pixel = found
                    inp = InputFrame(mark=pixel)
                    marked.add(idx)
        if phase == "rth":
            inp = InputFrame(rth=not rth_sent)
            rth_sent = True

        frames.append(inp)
        result = session.tick(inp)
        if result.ended:
            break
        if phase == "autopilot" and session.mission_complete:
            phase = "rth"
    return frames
