"""The per-session tick loop: wires flight physics, autopilot, HUD, mission
scoring, and telemetry into one deterministic fixed-timestep simulation."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from . import autopilot as ap
from . import flightsim as fs
from . import hud
from . import mission as ms
from .engine import EngineConfig, engine_to_json
from .geometry import Vec3, vadd
from .scenario import ScenarioSpec, emit_scenario, mission_boundary, zone_world_boxes
from .telemetry import (
    InputFrame,
    ScenarioMismatch,
    TelemetryLog,
    TelemetryRecord,
    canonical_line,
    parse_log,
    record_tick,
    record_to_dict,
    sha256_text,
    stream_hash,
)


@dataclass(frozen=True)
class TickResult:
    tick: int
    drone: fs.DroneState
    frame: hud.HudFrame
    events: tuple[str, ...]
    ended: bool


def drone_to_dict(s: fs.DroneState) -> dict:
    return {
        "pos_true": list(s.pos_true),
        "vel": list(s.vel),
        "yaw": s.yaw,
        "pos_est": list(s.pos_est),
        "gps_signal": s.gps_signal,
        "gps_lost": s.gps_lost,
        "uncertainty_radius": s.uncertainty_radius,
        "battery": s.battery,
        "airborne": s.airborne,
        "control_mode": s.control_mode,
        "collision": {
            "distances": list(s.collision.distances),
            "levels": list(s.collision.levels),
        },
    }


class Session:
    """One pilot, one scenario, one interface mode. Single-threaded; feed it
    exactly one InputFrame per tick."""

    def __init__(
        self,
        spec: ScenarioSpec,
        mode: str = hud.ADAPT_AR,
        cfg: EngineConfig | None = None,
    ):
        if mode not in hud.INTERFACE_MODES:
            raise ValueError(f"unknown interface mode {mode!r}")
        self.spec = spec
        self.mode = mode
        self.cfg = cfg or EngineConfig()
        self.battery_model = fs.battery_model(spec, self.cfg)
        self.plan = ap.generate_path(spec, self.cfg)
        self.zone_boxes = zone_world_boxes(spec)
        self.boundary = mission_boundary(spec)

        seed = spec.seed
        self.rng_wind = random.Random(f"{seed}:wind")
        self.rng_gps = random.Random(f"{seed}:gps")

        home = spec.home_point_m
        self.drone = fs.DroneState(pos_true=home, pos_est=home)
        self.wind = fs.WindState()
        self.ap_state = ap.AutopilotState()
        self.view = hud.ViewState()
        self.coverage = ms.CoverageMap.empty(len(self.plan.waypoints))
        self.marks: list[ms.Mark] = []
        self.track: list[Vec3] = []
        self.tick_index = 0
        self.airborne_ticks = 0
        self.entered_boundary = False
        self.mission_complete = False
        self.frozen = False
        self.ended = False
        self.end_reason: str | None = None
        self.disengage_count = 0

        self.scenario_doc = emit_scenario(spec)
        self.scenario_hash = sha256_text(self.scenario_doc)
        self.engine_hash = sha256_text(engine_to_json(self.cfg))
        self.log = TelemetryLog.new(
            scenario_sha256=self.scenario_hash,
            engine_sha256=self.engine_hash,
            seed=seed,
            mode=mode,
            scenario_doc=self.scenario_doc,
        )

    # -- issue detection --------------------------------------------------

    def _issues(self) -> frozenset[str]:
        s = self.drone
        issues = set()
        if s.gps_lost:
            issues.add("gps_lost")
        if s.collision.worst != fs.CLEAR:
            issues.add("collision")
        if s.airborne:
            rth_needed = fs.required_rth_fraction(s, self.battery_model, self.spec.home_point_m)
            if s.battery < max(self.battery_model.low_threshold, rth_needed):
                issues.add("battery_low")
            if s.control_mode == fs.MANUAL:
                issues.add("manual_control")
        return frozenset(issues)

    # -- command selection ------------------------------------------------

    def _manual_command(self, axes) -> fs.VelocityCommand:
        cfg = self.cfg
        a = [x if abs(x) > cfg.stick_deadzone else 0.0 for x in axes]
        forward, right, _ = ms.camera_axes(self.drone.yaw)
        vx = forward[0] * a[0] * cfg.max_horizontal_speed + right[0] * a[1] * cfg.max_horizontal_speed
        vy = forward[1] * a[0] * cfg.max_horizontal_speed + right[1] * a[1] * cfg.max_horizontal_speed
        vz = a[2] * cfg.max_vertical_speed
        return fs.VelocityCommand(velocity=(vx, vy, vz), yaw_rate=a[3] * cfg.max_yaw_rate)

    def _rth_command(self) -> tuple[fs.VelocityCommand, bool]:
        """Fly horizontally home at rth_speed, then descend; True when the
        final descent is in progress."""
        home = self.spec.home_point_m
        s = self.drone
        dx, dy = home[0] - s.pos_true[0], home[1] - s.pos_true[1]
        d = math.hypot(dx, dy)
        if d > 0.5:
            speed = min(self.cfg.rth_speed, d / self.cfg.dt)
            return fs.VelocityCommand(velocity=(dx / d * speed, dy / d * speed, 0.0)), False
        descent = min(self.cfg.land_speed, max(0.0, s.pos_true[2]) / self.cfg.dt)
        return fs.VelocityCommand(velocity=(0.0, 0.0, -descent)), True

    # -- the tick ---------------------------------------------------------

    def tick(self, raw_input: InputFrame) -> TickResult:
        if self.ended:
            raise RuntimeError("session has ended")
        inp = raw_input.clamped()
        cfg = self.cfg
        dt = cfg.dt
        t = self.tick_index * dt
        events: list[str] = []
        spec = self.spec
        home = spec.home_point_m

        prev = self.drone
        engaged_this_tick = False

        # buttons
        if inp.takeoff and not prev.airborne and self.end_reason is None:
            start = vadd(home, (0.0, 0.0, cfg.takeoff_altitude))
            self.drone = replace(
                prev, pos_true=start, pos_est=start, vel=(0.0, 0.0, 0.0), airborne=True, control_mode=fs.MANUAL
            )
            events.append("takeoff")
        if inp.rth and self.drone.airborne and self.drone.control_mode != fs.RTH:
            if self.ap_state.engaged:
                self.ap_state = replace(self.ap_state, engaged=False)
                self.disengage_count += 1
                events.append("autopilot_disengaged:manual_input")
            self.drone = replace(self.drone, control_mode=fs.RTH)
            events.append("rth_engaged")

        # wind evolves regardless of flight state
        self.wind = fs.update_wind(self.wind, spec, self.rng_wind, t, dt)

        # autopilot interrupts, then the toggle edge
        if self.ap_state.engaged:
            self.ap_state, ev = ap.apply_interrupts(
                self.ap_state, self.drone, inp.axes, self.battery_model, home, cfg
            )
            if ev:
                events.extend(ev)
                self.disengage_count += len(ev)
                self.drone = replace(self.drone, control_mode=fs.MANUAL)
        if inp.autopilot_toggle and self.drone.airborne and self.drone.control_mode != fs.RTH:
            if self.ap_state.engaged:
                self.ap_state = replace(self.ap_state, engaged=False)
                self.drone = replace(self.drone, control_mode=fs.MANUAL)
                self.disengage_count += 1
                events.append("autopilot_disengaged:manual_input")
            else:
                blocking = self._issues() - {"manual_control"}
                if not blocking and ap.can_engage(self.drone, self.plan, self.battery_model, home, cfg):
                    self.ap_state = ap.engage(self.drone, self.plan)
                    self.drone = replace(self.drone, control_mode=fs.AUTOPILOT)
                    engaged_this_tick = True
                    events.append("autopilot_engaged")
                else:
                    events.append("autopilot_refused")

        # command selection
        landing = False
        if self.ap_state.engaged:
            cmd, self.ap_state, ev = ap.autopilot_command(
                self.ap_state, self.drone, self.plan, spec, cfg, dt
            )
            events.extend(ev)
            if not self.ap_state.engaged:
                self.drone = replace(self.drone, control_mode=fs.MANUAL)
                if "mission_complete" in ev:
                    self.mission_complete = True
        elif self.drone.control_mode == fs.RTH:
            cmd, landing = self._rth_command()
        else:
            cmd = self._manual_command(inp.axes)

        # physics
        if not self.frozen:
            was_airborne = self.drone.airborne
            self.drone = fs.step_dynamics(self.drone, cmd, self.wind, cfg, dt)
            self.drone = fs.update_gps(self.drone, self.zone_boxes, cfg, self.rng_gps, dt)
            self.drone = fs.update_battery(self.drone, self.battery_model, dt)
            self.drone = replace(self.drone, collision=fs.sense_collisions(self.drone, spec, cfg))

            if was_airborne and self.drone.pos_true[2] <= 0.0:
                if self.drone.control_mode == fs.RTH and landing:
                    self.drone = replace(self.drone, airborne=False, vel=(0.0, 0.0, 0.0))
                    events.append("landed")
                    self.ended = True
                    self.end_reason = "landed"
                else:
                    events.append("ground_collision")
                    self.frozen = True

        # threshold crossings
        if self.drone.gps_lost and not prev.gps_lost:
            events.append("gps_lost")
        if prev.gps_lost and not self.drone.gps_lost:
            events.append("gps_recovered")
        low, crit = self.battery_model.low_threshold, self.battery_model.critical_threshold
        rth_needed = fs.required_rth_fraction(self.drone, self.battery_model, home)
        low_start = max(low, rth_needed)
        if prev.battery >= low_start and self.drone.battery < low_start:
            events.append("battery_low")
        if prev.battery >= crit and self.drone.battery < crit:
            events.append("battery_critical")
        worst, prev_worst = self.drone.collision.worst, prev.collision.worst
        if worst != prev_worst:
            if worst == fs.CLEAR:
                events.append("collision_clear")
            else:
                events.append(f"collision_{worst}")

        # coverage and marks
        pause_completed = [
            int(e.split(":")[1]) for e in events if e.startswith("waypoint_covered:")
        ]
        self.coverage = ms.update_coverage(
            self.coverage, self.drone, self.ap_state, self.plan, cfg, dt, pause_completed
        )
        if inp.mark is not None and self.drone.airborne:
            mk = ms.mark_defect(self.drone, inp.mark, spec, cfg, time_s=t)
            self.marks.append(mk)
            if mk.matched_defect is not None:
                events.append(f"mark:hit:{mk.matched_defect}")
            elif mk.hit_uv is not None:
                events.append("mark:facade_miss")
            else:
                events.append("mark:no_hit")

        # view state machine
        if not self.entered_boundary and self.boundary.contains(self.drone.pos_true):
            self.entered_boundary = True
            events.append("entered_boundary")
        issues = self._issues()
        self.view = hud.transition_view(
            self.view,
            issues,
            autopilot_clicked=engaged_this_tick,
            can_engage_now=True,
            in_boundary=self.entered_boundary,
        )
        gaze = hud.Ray(origin=inp.gaze_origin, direction=inp.gaze_direction)
        frame = hud.compose_hud_frame(
            self.mode,
            self.view,
            self.drone,
            self.ap_state,
            self.plan,
            spec,
            gaze,
            m=self.battery_model,
            cfg=cfg,
            covered=self.coverage.covered,
            marks=self.marks,
        )

        if self.drone.airborne:
            self.airborne_ticks += 1
            self.track.append(self.drone.pos_true)

        if self.drone.airborne and self.drone.battery <= 0.0 and not self.ended:
            events.append("battery_depleted")
            self.ended = True
            self.end_reason = "battery_depleted"

        rec = TelemetryRecord(
            tick=self.tick_index,
            input=inp,
            drone=drone_to_dict(self.drone),
            view={"phase": self.view.phase, "active_issues": sorted(self.view.active_issues)},
            events=tuple(events),
            hud_element_count=len(frame.elements),
        )
        record_tick(self.log, rec)

        result = TickResult(
            tick=self.tick_index,
            drone=self.drone,
            frame=frame,
            events=tuple(events),
            ended=self.ended,
        )
        self.tick_index += 1
        return result

    # -- reporting --------------------------------------------------------

    def metrics(self, partial: bool = False) -> dict:
        score = ms.score_marks(self.marks, self.spec)
        if len(self.track) >= 2:
            deviation = ms.path_deviation(self.plan, self.track)
        else:
            deviation = None
            partial = True
        return {
            "marked_pct": score["marked_pct"],
            "false_marks": score["false_marks"],
            "deviation_m": deviation,
            "coverage_pct": 100.0 * self.coverage.fraction,
            "flight_time_s": self.airborne_ticks * self.cfg.dt,
            "disengage_events": self.disengage_count,
            "mission_complete": self.mission_complete,
            "end_reason": self.end_reason,
            "partial": partial,
        }

    def telemetry_hash(self) -> str:
        return stream_hash(self.log)


def run_script(
    spec: ScenarioSpec,
    mode: str,
    frames: list[InputFrame],
    cfg: EngineConfig | None = None,
) -> Session:
    """Run a scripted flight to completion (script end, landing, or battery)."""
    session = Session(spec, mode, cfg)
    for frame in frames:
        result = session.tick(frame)
        if result.ended:
            break
    return session


def replay_log(text: str, cfg: EngineConfig | None = None) -> tuple[Session, str, int | None]:
    """Re-run a telemetry log's inputs; returns (session, live hash, first
    divergent tick or None). Raises ScenarioMismatch on header disagreement."""
    from .scenario import parse_scenario

    log = parse_log(text)
    header = log.header
    spec = parse_scenario(header["scenario_doc"])
    cfg = cfg or EngineConfig()
    if sha256_text(emit_scenario(spec)) != header.get("scenario_sha256"):
        raise ScenarioMismatch("scenario document does not match its recorded hash")
    if sha256_text(engine_to_json(cfg)) != header.get("engine_sha256"):
        raise ScenarioMismatch("engine configuration differs from the recorded one")
    if spec.seed != header.get("seed"):
        raise ScenarioMismatch("seed differs from the recorded one")

    session = Session(spec, header.get("mode", hud.ADAPT_AR), cfg)
    divergent: int | None = None
    for rec in log.records:
        result = session.tick(rec.input)
        if divergent is None:
            live = session.log.records[-1]
            if canonical_line(record_to_dict(live)) != canonical_line(record_to_dict(rec)):
                divergent = rec.tick
        if result.ended:
            break
    return session, stream_hash(log), divergent
