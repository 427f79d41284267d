"""Inspection scenario model: building, facade frame, defects, GPS zones, obstacles.

Scenarios are stored as canonical JSON documents (see docs/scenario-schema.md,
extension ``.scenario.json``). All lengths are meters, times seconds, angles
radians; unit suffixes are part of the field names.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace

from .geometry import Aabb, Vec3, vadd, vscale

SCHEMA_VERSION = 1

DEFECT_KINDS = (
    "paint_peel",
    "wall_crack",
    "wall_dent",
    "rotten_surface",
    "leakage",
    "delamination",
)

OBSTACLE_KINDS = ("tree", "gondola")

FACADE_FACES = ("south", "north", "west", "east")


class ScenarioError(Exception):
    """Base class for scenario loading problems."""


class ScenarioSyntaxError(ScenarioError):
    """The document is not well-formed JSON."""


class SchemaError(ScenarioError):
    """The document does not satisfy the scenario schema or its invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class GeometryError(ScenarioError):
    """A geometric construction is infeasible (placement, standoff, ...)."""


class OutOfBoundsError(ScenarioError):
    """A facade coordinate lies outside the facade rectangle."""


@dataclass(frozen=True)
class Defect:
    kind: str
    center_uv_m: tuple[float, float]
    radius_m: float
    layer: int
    shadowed: bool = False


@dataclass(frozen=True)
class FacadeRect:
    u_min_m: float
    u_max_m: float
    v_min_m: float
    v_max_m: float
    depth_m: float


@dataclass(frozen=True)
class Obstacle:
    kind: str
    box_min_m: Vec3
    box_max_m: Vec3
    sensor_detectable_fraction: float = 1.0


@dataclass(frozen=True)
class WindParams:
    max_accel_mps2: float = 1.2
    slew_mps3: float = 0.5
    resample_interval_s: tuple[float, float] = (4.0, 10.0)


@dataclass(frozen=True)
class ScenarioSpec:
    building_size_m: Vec3
    facade_face: str = "south"
    layers: int = 12
    defects: tuple[Defect, ...] = ()
    gps_zones: tuple[FacadeRect, ...] = ()
    obstacles: tuple[Obstacle, ...] = ()
    wind: WindParams = field(default_factory=WindParams)
    battery_full_duration_s: float = 260.0
    home_point_m: Vec3 = (0.0, -20.0, 0.0)
    standoff_distance_m: float = 7.0
    boundary_margin_m: float = 12.0
    seed: int = 0


@dataclass(frozen=True)
class FacadeFrame:
    """Local 2D frame of the inspected face: u rightward, v upward when
    facing the facade from outside."""

    origin: Vec3
    u_axis: Vec3
    outward: Vec3
    width: float
    height: float


def facade_frame(spec: ScenarioSpec) -> FacadeFrame:
    w, l, h = spec.building_size_m
    face = spec.facade_face
    if face == "south":
        return FacadeFrame((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, -1.0, 0.0), w, h)
    if face == "north":
        return FacadeFrame((w, l, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), w, h)
    if face == "west":
        return FacadeFrame((0.0, l, 0.0), (0.0, -1.0, 0.0), (-1.0, 0.0, 0.0), l, h)
    if face == "east":
        return FacadeFrame((w, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0), l, h)
    raise SchemaError([f"facade_face must be one of {FACADE_FACES}"])


def facade_to_world(spec: ScenarioSpec, u: float, v: float, out: float = 0.0) -> Vec3:
    """Map facade coordinates (plus an optional outward offset) to world."""
    fr = facade_frame(spec)
    if not (0.0 <= u <= fr.width and 0.0 <= v <= fr.height):
        raise OutOfBoundsError(f"({u}, {v}) outside facade {fr.width}x{fr.height}")
    p = vadd(fr.origin, vscale(fr.u_axis, u))
    p = (p[0], p[1], p[2] + v)
    if out:
        p = vadd(p, vscale(fr.outward, out))
    return p


def world_to_facade(spec: ScenarioSpec, p: Vec3) -> tuple[float, float, float]:
    """Inverse of facade_to_world: returns (u, v, outward distance)."""
    fr = facade_frame(spec)
    d = (p[0] - fr.origin[0], p[1] - fr.origin[1], p[2] - fr.origin[2])
    u = d[0] * fr.u_axis[0] + d[1] * fr.u_axis[1]
    out = d[0] * fr.outward[0] + d[1] * fr.outward[1]
    return (u, d[2], out)


def building_box(spec: ScenarioSpec) -> Aabb:
    w, l, h = spec.building_size_m
    return Aabb((0.0, 0.0, 0.0), (w, l, h))


def mission_boundary(spec: ScenarioSpec) -> Aabb:
    """Safe operating volume: the building box inflated by the margin."""
    box = building_box(spec).inflate(spec.boundary_margin_m)
    return Aabb((box.lo[0], box.lo[1], 0.0), box.hi)


def zone_world_boxes(spec: ScenarioSpec) -> list[Aabb]:
    """GPS-denied zones as world AABBs extruded outward from the facade."""
    boxes = []
    for z in spec.gps_zones:
        corners = [
            facade_to_world(spec, z.u_min_m, z.v_min_m),
            facade_to_world(spec, z.u_max_m, z.v_max_m),
            facade_to_world(spec, z.u_min_m, z.v_min_m, z.depth_m),
            facade_to_world(spec, z.u_max_m, z.v_max_m, z.depth_m),
        ]
        lo = tuple(min(c[i] for c in corners) for i in range(3))
        hi = tuple(max(c[i] for c in corners) for i in range(3))
        boxes.append(Aabb(lo, hi))
    return boxes


# --- validation ---------------------------------------------------------


def validate_scenario(spec: ScenarioSpec) -> list[str]:
    """Check every ScenarioSpec invariant; violations are data, not failures."""
    v: list[str] = []
    for i, ext in enumerate(spec.building_size_m):
        if not ext > 0:
            v.append(f"building_size_m[{i}] must be > 0")
    if spec.facade_face not in FACADE_FACES:
        v.append(f"facade_face must be one of {FACADE_FACES}")
        return v  # facade frame undefined; bounds checks would raise
    if spec.layers < 1:
        v.append("layers must be >= 1")
    if not spec.battery_full_duration_s > 0:
        v.append("battery_full_duration_s must be > 0")
    if not spec.standoff_distance_m > 0:
        v.append("standoff_distance_m must be > 0")
    if not spec.boundary_margin_m > 0:
        v.append("boundary_margin_m must be > 0")

    fr = facade_frame(spec)
    for i, d in enumerate(spec.defects):
        if d.kind not in DEFECT_KINDS:
            v.append(f"defects[{i}].kind must be one of {DEFECT_KINDS}")
        if not d.radius_m > 0:
            v.append(f"defects[{i}].radius_m must be > 0")
        if spec.layers >= 1 and not (0 <= d.layer < spec.layers):
            v.append(f"defects[{i}].layer must be in [0, {spec.layers})")
        u, dv = d.center_uv_m
        if not (0.0 <= u <= fr.width and 0.0 <= dv <= fr.height):
            v.append(f"defects[{i}].center_uv_m must lie within the facade")
    for i, z in enumerate(spec.gps_zones):
        if not z.u_min_m < z.u_max_m:
            v.append(f"gps_zones[{i}]: u_min_m must be < u_max_m")
        if not z.v_min_m < z.v_max_m:
            v.append(f"gps_zones[{i}]: v_min_m must be < v_max_m")
        if not z.depth_m > 0:
            v.append(f"gps_zones[{i}].depth_m must be > 0")
        if not (0.0 <= z.u_min_m and z.u_max_m <= fr.width and 0.0 <= z.v_min_m and z.v_max_m <= fr.height):
            v.append(f"gps_zones[{i}] must lie within the facade")
    for i, o in enumerate(spec.obstacles):
        if o.kind not in OBSTACLE_KINDS:
            v.append(f"obstacles[{i}].kind must be one of {OBSTACLE_KINDS}")
        if not all(o.box_min_m[k] < o.box_max_m[k] for k in range(3)):
            v.append(f"obstacles[{i}] volume must be non-degenerate")
        if not 0.0 <= o.sensor_detectable_fraction <= 1.0:
            v.append(f"obstacles[{i}].sensor_detectable_fraction must be in [0, 1]")
    wp = spec.wind
    if not (wp.max_accel_mps2 > 0 and wp.slew_mps3 > 0):
        v.append("wind.max_accel_mps2 and wind.slew_mps3 must be > 0")
    lo, hi = wp.resample_interval_s
    if not (lo > 0 and lo <= hi):
        v.append("wind.resample_interval_s must satisfy 0 < min <= max")
    return v


# --- parsing / emission -------------------------------------------------

_TOP_FIELDS = {
    "schema_version",
    "building_size_m",
    "facade_face",
    "layers",
    "defects",
    "gps_zones",
    "obstacles",
    "wind",
    "battery_full_duration_s",
    "home_point_m",
    "standoff_distance_m",
    "boundary_margin_m",
    "seed",
}


def _require(d: dict, key: str, errors: list[str]):
    if key not in d:
        errors.append(f"missing required field: {key}")
        return None
    return d[key]


def _check_unknown(d: dict, allowed: set[str], where: str, errors: list[str]):
    for k in d:
        if k not in allowed:
            errors.append(f"unknown field {where}{k}")


def _vec3(value, where: str, errors: list[str]) -> Vec3:
    if not (isinstance(value, list) and len(value) == 3 and all(isinstance(x, (int, float)) for x in value)):
        errors.append(f"{where} must be a list of 3 numbers")
        return (0.0, 0.0, 0.0)
    return (float(value[0]), float(value[1]), float(value[2]))


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse and validate a scenario document.

    Raises ScenarioSyntaxError on malformed JSON, SchemaError on unknown or
    missing fields and on any invariant violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise ScenarioSyntaxError("scenario document must be a JSON object")

    errors: list[str] = []
    _check_unknown(doc, _TOP_FIELDS, "", errors)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        errors.append(f"unsupported schema_version {version}")

    size = _vec3(_require(doc, "building_size_m", errors) or [1, 1, 1], "building_size_m", errors)

    defects = []
    for i, dd in enumerate(doc.get("defects", [])):
        _check_unknown(dd, {"kind", "center_uv_m", "radius_m", "layer", "shadowed"}, f"defects[{i}].", errors)
        try:
            defects.append(
                Defect(
                    kind=dd["kind"],
                    center_uv_m=(float(dd["center_uv_m"][0]), float(dd["center_uv_m"][1])),
                    radius_m=float(dd["radius_m"]),
                    layer=int(dd["layer"]),
                    shadowed=bool(dd.get("shadowed", False)),
                )
            )
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            errors.append(f"defects[{i}]: {exc!r}")
    zones = []
    for i, zz in enumerate(doc.get("gps_zones", [])):
        _check_unknown(zz, {"u_min_m", "u_max_m", "v_min_m", "v_max_m", "depth_m"}, f"gps_zones[{i}].", errors)
        try:
            zones.append(FacadeRect(*(float(zz[k]) for k in ("u_min_m", "u_max_m", "v_min_m", "v_max_m", "depth_m"))))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"gps_zones[{i}]: {exc!r}")
    obstacles = []
    for i, oo in enumerate(doc.get("obstacles", [])):
        _check_unknown(oo, {"kind", "box_min_m", "box_max_m", "sensor_detectable_fraction"}, f"obstacles[{i}].", errors)
        try:
            obstacles.append(
                Obstacle(
                    kind=oo["kind"],
                    box_min_m=_vec3(oo["box_min_m"], f"obstacles[{i}].box_min_m", errors),
                    box_max_m=_vec3(oo["box_max_m"], f"obstacles[{i}].box_max_m", errors),
                    sensor_detectable_fraction=float(oo.get("sensor_detectable_fraction", 1.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"obstacles[{i}]: {exc!r}")
    wind = WindParams()
    if "wind" in doc:
        ww = doc["wind"]
        _check_unknown(ww, {"max_accel_mps2", "slew_mps3", "resample_interval_s"}, "wind.", errors)
        try:
            wind = WindParams(
                max_accel_mps2=float(ww.get("max_accel_mps2", wind.max_accel_mps2)),
                slew_mps3=float(ww.get("slew_mps3", wind.slew_mps3)),
                resample_interval_s=tuple(float(x) for x in ww.get("resample_interval_s", wind.resample_interval_s)),
            )
        except (TypeError, ValueError) as exc:
            errors.append(f"wind: {exc!r}")

    if errors:
        raise SchemaError(errors)

    spec = ScenarioSpec(
        building_size_m=size,
        facade_face=doc.get("facade_face", "south"),
        layers=int(doc.get("layers", 12)),
        defects=tuple(defects),
        gps_zones=tuple(zones),
        obstacles=tuple(obstacles),
        wind=wind,
        battery_full_duration_s=float(doc.get("battery_full_duration_s", 260.0)),
        home_point_m=_vec3(doc.get("home_point_m", [0.0, -20.0, 0.0]), "home_point_m", errors),
        standoff_distance_m=float(doc.get("standoff_distance_m", 7.0)),
        boundary_margin_m=float(doc.get("boundary_margin_m", 12.0)),
        seed=int(doc.get("seed", 0)),
    )
    violations = validate_scenario(spec)
    if violations:
        raise SchemaError(violations)
    return spec


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "building_size_m": list(spec.building_size_m),
        "facade_face": spec.facade_face,
        "layers": spec.layers,
        "defects": [
            {
                "kind": d.kind,
                "center_uv_m": list(d.center_uv_m),
                "radius_m": d.radius_m,
                "layer": d.layer,
                "shadowed": d.shadowed,
            }
            for d in spec.defects
        ],
        "gps_zones": [
            {
                "u_min_m": z.u_min_m,
                "u_max_m": z.u_max_m,
                "v_min_m": z.v_min_m,
                "v_max_m": z.v_max_m,
                "depth_m": z.depth_m,
            }
            for z in spec.gps_zones
        ],
        "obstacles": [
            {
                "kind": o.kind,
                "box_min_m": list(o.box_min_m),
                "box_max_m": list(o.box_max_m),
                "sensor_detectable_fraction": o.sensor_detectable_fraction,
            }
            for o in spec.obstacles
        ],
        "wind": {
            "max_accel_mps2": spec.wind.max_accel_mps2,
            "slew_mps3": spec.wind.slew_mps3,
            "resample_interval_s": list(spec.wind.resample_interval_s),
        },
        "battery_full_duration_s": spec.battery_full_duration_s,
        "home_point_m": list(spec.home_point_m),
        "standoff_distance_m": spec.standoff_distance_m,
        "boundary_margin_m": spec.boundary_margin_m,
        "seed": spec.seed,
    }


def emit_scenario(spec: ScenarioSpec) -> str:
    """Canonical byte-stable document form; parse(emit(s)) == s."""
    return json.dumps(scenario_to_dict(spec), sort_keys=True, indent=2) + "\n"


# --- procedural defect layout ------------------------------------------


def generate_defect_layout(seed: int, frame: FacadeFrame, layers: int) -> list[Defect]:
    """Scatter defects over the facade: 0-2 per layer, totalling 11-12 when
    layers=12, deterministic in the seed."""
    if layers < 1:
        raise GeometryError("layers must be >= 1")
    rng = random.Random(seed)
    lo_total = math.ceil(11 * layers / 12)
    total = rng.randint(lo_total, max(lo_total, layers))

    # Each layer offers two slots; a shuffled prefix fixes per-layer counts.
    slots = [j for j in range(layers) for _ in range(2)]
    rng.shuffle(slots)
    counts = [0] * layers
    for j in slots[:total]:
        counts[j] += 1

    layer_h = frame.height / layers
    kinds = list(DEFECT_KINDS)
    rng.shuffle(kinds)
    defects: list[Defect] = []
    k = 0
    for j in range(layers):
        for _ in range(counts[j]):
            radius = rng.uniform(0.7, 1.2)
            placed = False
            for _attempt in range(200):
                if frame.width <= 2 * radius or layer_h <= 2 * radius:
                    break
                u = rng.uniform(radius, frame.width - radius)
                v = rng.uniform(j * layer_h + radius, (j + 1) * layer_h - radius)
                ok = all(
                    math.hypot(u - d.center_uv_m[0], v - d.center_uv_m[1]) >= radius + d.radius_m
                    for d in defects
                )
                if ok:
                    defects.append(
                        Defect(
                            kind=kinds[k % len(kinds)],
                            center_uv_m=(u, v),
                            radius_m=radius,
                            layer=j,
                            shadowed=rng.random() < 0.2,
                        )
                    )
                    k += 1
                    placed = True
                    break
            if not placed:
                raise GeometryError(
                    f"facade too small to place {counts[j]} defects on layer {j} without overlap"
                )
    return defects


def populate_defects(spec: ScenarioSpec) -> ScenarioSpec:
    """Fill in a generated defect layout when the document shipped none."""
    if spec.defects:
        return spec
    layout = generate_defect_layout(spec.seed, facade_frame(spec), spec.layers)
    return replace(spec, defects=tuple(layout))
