"""Engine configuration: the fixed timestep and every tuning constant that is
not part of a scenario document. Loadable from a JSON document of the same
family as scenario files (docs/scenario-schema.md)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class EngineConfig:
    # fixed-timestep loop
    tick_rate_hz: float = 50.0

    # velocity tracking (manual mode) and speed envelope
    velocity_gain: float = 4.0          # 1/s
    max_horizontal_speed: float = 5.0   # m/s
    max_vertical_speed: float = 3.0     # m/s
    max_yaw_rate: float = 1.5           # rad/s

    # GPS / uncertainty model
    gps_rate: float = 0.25              # signal slew, 1/s
    gps_lost_threshold: float = 0.4
    uncertainty_grow_rate: float = 0.4  # m/s while lost
    uncertainty_cap: float = 3.0        # m
    uncertainty_decay_rate: float = 1.0 # m/s while recovered
    uncertainty_floor: float = 0.05     # m
    est_walk_rate: float = 0.6          # m/s random walk of the estimate while lost

    # proximity sensing
    collision_warn_distance: float = 5.0      # m, horizontal sectors
    collision_critical_distance: float = 2.0  # m, horizontal sectors
    vertical_warn_distance: float = 1.5       # m, up/down rays
    vertical_critical_distance: float = 0.5   # m, up/down rays
    sensor_range: float = 60.0                # m, readings beyond are inf

    # battery / return-to-home
    battery_low_threshold: float = 0.25
    battery_critical_threshold: float = 0.10
    rth_speed: float = 5.0     # m/s horizontal
    land_speed: float = 1.5    # m/s descent
    rth_margin_s: float = 15.0
    land_floor: float = 0.05   # battery fraction where the red bar saturates

    # autopilot
    cruise_speed: float = 2.0      # m/s
    pause_duration_s: float = 2.0
    arrival_radius: float = 0.3    # m
    engage_radius: float = 3.0     # m
    stick_deadzone: float = 0.1
    column_spacing: float = 6.0    # m, max waypoint spacing along a layer
    yaw_gain: float = 3.0          # 1/s, autopilot facing control

    # mission scoring
    hold_radius: float = 0.5       # m, manual coverage dwell
    hold_time_s: float = 2.0
    camera_hfov_rad: float = 1.2217304763960306  # 70 degrees
    camera_aspect: float = 16.0 / 9.0

    # HUD
    gaze_full_angle: float = 0.15  # rad, panel fully opaque inside this
    gaze_faded_angle: float = 0.6  # rad, linear falloff endpoint
    panel_min_alpha: float = 0.25

    # takeoff
    takeoff_altitude: float = 1.5  # m, hop on the takeoff button

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate_hz


def engine_to_json(cfg: EngineConfig) -> str:
    return json.dumps(asdict(cfg), sort_keys=True, indent=2) + "\n"


def engine_from_json(text: str) -> EngineConfig:
    doc = json.loads(text)
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown engine config fields: {sorted(unknown)}")
    return EngineConfig(**doc)
