"""Fixed-timestep flight physics and safety signals.

Every update here is a pure function of (state, params, rng stream, dt), so a
given seed reproduces a bit-identical trajectory. Positions in world meters,
Z up.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .engine import EngineConfig
from .geometry import (
    Aabb,
    Vec3,
    ZERO3,
    hnorm,
    ray_aabb_distance,
    vadd,
    vclamp_norm,
    vdist,
    vnorm,
    vscale,
    vsub,
    vunit,
)
from .scenario import ScenarioSpec, building_box

SECTOR_COUNT = 8  # horizontal rays, sector 0 forward, counterclockwise

CLEAR, WARN, CRITICAL = "clear", "warn", "critical"

MANUAL, AUTOPILOT, RTH = "manual", "autopilot", "rth"


@dataclass(frozen=True)
class CollisionReadings:
    """8 horizontal sector distances plus up and down, with derived levels."""

    distances: tuple[float, ...] = (math.inf,) * (SECTOR_COUNT + 2)
    levels: tuple[str, ...] = (CLEAR,) * (SECTOR_COUNT + 2)

    @property
    def worst(self) -> str:
        if CRITICAL in self.levels:
            return CRITICAL
        if WARN in self.levels:
            return WARN
        return CLEAR


@dataclass(frozen=True)
class WindState:
    current: Vec3 = ZERO3        # induced acceleration, m/s^2
    target: Vec3 = ZERO3
    next_resample_at: float = 0.0  # session time, seconds


@dataclass(frozen=True)
class BatteryModel:
    full_duration_s: float
    low_threshold: float = 0.25
    critical_threshold: float = 0.10
    rth_speed: float = 5.0
    land_speed: float = 1.5
    rth_margin_s: float = 15.0
    land_floor: float = 0.05


def battery_model(spec: ScenarioSpec, cfg: EngineConfig) -> BatteryModel:
    return BatteryModel(
        full_duration_s=spec.battery_full_duration_s,
        low_threshold=cfg.battery_low_threshold,
        critical_threshold=cfg.battery_critical_threshold,
        rth_speed=cfg.rth_speed,
        land_speed=cfg.land_speed,
        rth_margin_s=cfg.rth_margin_s,
        land_floor=cfg.land_floor,
    )


@dataclass(frozen=True)
class DroneState:
    pos_true: Vec3 = ZERO3
    vel: Vec3 = ZERO3
    yaw: float = 0.0
    pos_est: Vec3 = ZERO3
    gps_signal: float = 1.0
    gps_lost: bool = False
    uncertainty_radius: float = 0.05
    battery: float = 1.0
    airborne: bool = False
    control_mode: str = MANUAL
    collision: CollisionReadings = field(default_factory=CollisionReadings)


@dataclass(frozen=True)
class VelocityCommand:
    velocity: Vec3 = ZERO3   # world frame, m/s
    yaw_rate: float = 0.0    # rad/s

    @property
    def is_zero(self) -> bool:
        return self.velocity == ZERO3 and self.yaw_rate == 0.0


# --- wind ---------------------------------------------------------------


def update_wind(w: WindState, spec: ScenarioSpec, rng: random.Random, t: float, dt: float) -> WindState:
    """Slew the wind vector toward its target; redraw the target at random
    intervals so direction and intensity change gradually, never in steps."""
    p = spec.wind
    target = w.target
    next_at = w.next_resample_at
    if t >= next_at:
        angle = rng.uniform(0.0, 2.0 * math.pi)
        vertical = rng.uniform(-0.2, 0.2)
        mag = rng.uniform(0.0, p.max_accel_mps2)
        direction = vunit((math.cos(angle), math.sin(angle), vertical))
        target = vscale(direction, mag)
        next_at = t + rng.uniform(*p.resample_interval_s)

    delta = vsub(target, w.current)
    step = p.slew_mps3 * dt
    if vnorm(delta) <= step:
        current = target
    else:
        current = vadd(w.current, vscale(vunit(delta), step))
    current = vclamp_norm(current, p.max_accel_mps2)
    return WindState(current=current, target=target, next_resample_at=next_at)


# --- GPS / positional uncertainty ---------------------------------------


def update_gps(
    s: DroneState,
    zone_boxes: list[Aabb],
    cfg: EngineConfig,
    rng: random.Random,
    dt: float,
) -> DroneState:
    """Slew the GPS signal toward 0 inside a denied zone and 1 outside, and
    evolve the uncertainty radius / position estimate accordingly."""
    inside = any(b.contains(s.pos_true) for b in zone_boxes)
    target = 0.0 if inside else 1.0
    step = cfg.gps_rate * dt
    if abs(target - s.gps_signal) <= step:
        signal = target
    else:
        signal = s.gps_signal + math.copysign(step, target - s.gps_signal)
    lost = signal < cfg.gps_lost_threshold

    if lost:
        radius = min(s.uncertainty_radius + cfg.uncertainty_grow_rate * dt, cfg.uncertainty_cap)
        walk = (
            rng.uniform(-1.0, 1.0) * cfg.est_walk_rate * dt,
            rng.uniform(-1.0, 1.0) * cfg.est_walk_rate * dt,
            rng.uniform(-1.0, 1.0) * cfg.est_walk_rate * dt * 0.3,
        )
        est = vadd(s.pos_est, walk)
    else:
        radius = max(s.uncertainty_radius - cfg.uncertainty_decay_rate * dt, cfg.uncertainty_floor)
        err = vsub(s.pos_est, s.pos_true)
        mag = vnorm(err)
        shrink = cfg.uncertainty_decay_rate * dt
        est = s.pos_true if mag <= shrink else vadd(s.pos_true, vscale(err, (mag - shrink) / mag))

    # the estimate never leaves the advertised uncertainty ball
    err = vsub(est, s.pos_true)
    if vnorm(err) > radius:
        est = vadd(s.pos_true, vscale(vunit(err), radius))

    return replace(s, gps_signal=signal, gps_lost=lost, uncertainty_radius=radius, pos_est=est)


# --- dynamics -----------------------------------------------------------


def _clamp_velocity(v: Vec3, cfg: EngineConfig) -> Vec3:
    h = hnorm(v)
    if h > cfg.max_horizontal_speed:
        f = cfg.max_horizontal_speed / h
        v = (v[0] * f, v[1] * f, v[2])
    vz = max(-cfg.max_vertical_speed, min(cfg.max_vertical_speed, v[2]))
    return (v[0], v[1], vz)


def step_dynamics(
    s: DroneState,
    cmd: VelocityCommand,
    wind: WindState,
    cfg: EngineConfig,
    dt: float,
) -> DroneState:
    """Integrate one tick. Manual velocity tracking is first order with gain
    `velocity_gain`; autopilot and RTH track their command exactly. With GPS
    available and a zero command, position hold cancels wind entirely."""
    if not s.airborne:
        return s

    if not s.gps_lost and cmd.velocity == ZERO3:
        vel: Vec3 = ZERO3
        pos = s.pos_true
    else:
        if s.control_mode == MANUAL:
            k = cfg.velocity_gain
            vel = vadd(s.vel, vscale(vsub(cmd.velocity, s.vel), k * dt))
        else:
            vel = cmd.velocity
        if s.gps_lost:
            vel = vadd(vel, vscale(wind.current, dt))
        vel = _clamp_velocity(vel, cfg)
        pos = vadd(s.pos_true, vscale(vel, dt))
    pos = (pos[0], pos[1], max(0.0, pos[2]))

    yaw_rate = max(-cfg.max_yaw_rate, min(cfg.max_yaw_rate, cmd.yaw_rate))
    yaw = s.yaw + yaw_rate * dt

    # the estimate rides along with true motion; GPS updates add the error
    est = vadd(s.pos_est, vsub(pos, s.pos_true))
    return replace(s, pos_true=pos, vel=vel, yaw=yaw, pos_est=est)


# --- battery ------------------------------------------------------------


def update_battery(s: DroneState, m: BatteryModel, dt: float) -> DroneState:
    if not s.airborne:
        return s
    return replace(s, battery=max(0.0, s.battery - dt / m.full_duration_s))


def required_rth_fraction(s: DroneState, m: BatteryModel, home: Vec3) -> float:
    """Battery fraction needed to fly home and land from the current pose."""
    horizontal = math.hypot(s.pos_true[0] - home[0], s.pos_true[1] - home[1])
    altitude = max(0.0, s.pos_true[2])
    seconds = horizontal / m.rth_speed + altitude / m.land_speed + m.rth_margin_s
    return min(1.0, max(0.0, seconds / m.full_duration_s))


# --- proximity sensing --------------------------------------------------


def detectable_box(obstacle) -> Aabb:
    """Sub-volume the proximity sensor can actually see. The box is shrunk
    uniformly about its center so the detectable volume fraction equals
    sensor_detectable_fraction; the rest (thin branches, wires) is invisible."""
    box = Aabb(obstacle.box_min_m, obstacle.box_max_m)
    f = obstacle.sensor_detectable_fraction
    if f >= 1.0:
        return box
    return box.scaled_about_center(f ** (1.0 / 3.0))


def _level(distance: float, warn: float, critical: float) -> str:
    if distance < critical:
        return CRITICAL
    if distance < warn:
        return WARN
    return CLEAR


def sense_collisions(s: DroneState, spec: ScenarioSpec, cfg: EngineConfig) -> CollisionReadings:
    """Cast 8 horizontal rays (sector 0 along the heading) plus up and down
    against the building, the ground, and detectable obstacle volumes."""
    boxes = [building_box(spec)] + [detectable_box(o) for o in spec.obstacles if o.sensor_detectable_fraction > 0.0]
    origin = s.pos_true

    distances: list[float] = []
    for i in range(SECTOR_COUNT):
        a = s.yaw + i * (2.0 * math.pi / SECTOR_COUNT)
        direction = (math.cos(a), math.sin(a), 0.0)
        d = min((ray_aabb_distance(origin, direction, b) for b in boxes), default=math.inf)
        distances.append(d if d <= cfg.sensor_range else math.inf)

    up = min((ray_aabb_distance(origin, (0.0, 0.0, 1.0), b) for b in boxes), default=math.inf)
    down_boxes = min((ray_aabb_distance(origin, (0.0, 0.0, -1.0), b) for b in boxes), default=math.inf)
    down = min(down_boxes, max(0.0, origin[2]))
    distances.append(up if up <= cfg.sensor_range else math.inf)
    distances.append(down if down <= cfg.sensor_range else math.inf)

    levels = [
        _level(d, cfg.collision_warn_distance, cfg.collision_critical_distance)
        for d in distances[:SECTOR_COUNT]
    ] + [
        _level(d, cfg.vertical_warn_distance, cfg.vertical_critical_distance)
        for d in distances[SECTOR_COUNT:]
    ]
    return CollisionReadings(distances=tuple(distances), levels=tuple(levels))
