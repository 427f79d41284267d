"""The three bundled task configurations (one short facade, two long).

Building dimensions for the long facades follow the inspected building used
throughout the scenario description; exact defect and zone placements are
repo-authored. Defect layouts are generated from each configuration's seed.
"""

from __future__ import annotations

from importlib import resources

from .scenario import (
    FacadeRect,
    Obstacle,
    ScenarioSpec,
    WindParams,
    emit_scenario,
    parse_scenario,
    populate_defects,
)

STOCK_NAMES = ("short_a", "long_a", "long_b")


def build_stock(name: str) -> ScenarioSpec:
    if name == "short_a":
        spec = ScenarioSpec(
            building_size_m=(20.0, 16.0, 24.0),
            facade_face="south",
            layers=6,
            gps_zones=(
                FacadeRect(2.0, 8.0, 8.0, 14.0, 5.0),
                FacadeRect(13.0, 18.0, 16.0, 22.0, 5.0),
            ),
            obstacles=(
                Obstacle(kind="tree", box_min_m=(-12.0, -9.0, 0.0), box_max_m=(-7.0, -5.0, 10.0), sensor_detectable_fraction=0.4),
                Obstacle(kind="gondola", box_min_m=(6.0, -15.5, 18.0), box_max_m=(9.0, -13.5, 20.0), sensor_detectable_fraction=1.0),
            ),
            battery_full_duration_s=260.0,
            home_point_m=(10.0, -20.0, 0.0),
            standoff_distance_m=7.0,
            boundary_margin_m=12.0,
            seed=11,
        )
    elif name == "long_a":
        spec = ScenarioSpec(
            building_size_m=(34.0, 29.46, 62.0),
            facade_face="south",
            layers=12,
            gps_zones=(
                FacadeRect(4.0, 12.0, 10.0, 20.0, 5.0),
                FacadeRect(20.0, 30.0, 34.0, 46.0, 5.0),
            ),
            obstacles=(
                Obstacle(kind="tree", box_min_m=(-14.0, -10.0, 0.0), box_max_m=(-8.0, -4.0, 14.0), sensor_detectable_fraction=0.4),
                Obstacle(kind="gondola", box_min_m=(14.0, -16.0, 50.0), box_max_m=(17.0, -14.0, 52.5), sensor_detectable_fraction=1.0),
            ),
            battery_full_duration_s=310.0,
            home_point_m=(17.0, -24.0, 0.0),
            standoff_distance_m=7.0,
            boundary_margin_m=12.0,
            seed=21,
        )
    elif name == "long_b":
        spec = ScenarioSpec(
            building_size_m=(34.0, 29.46, 62.0),
            facade_face="south",
            layers=12,
            gps_zones=(
                FacadeRect(2.0, 10.0, 40.0, 52.0, 5.0),
                FacadeRect(16.0, 26.0, 6.0, 16.0, 5.0),
            ),
            obstacles=(
                Obstacle(kind="tree", box_min_m=(40.0, -10.0, 0.0), box_max_m=(46.0, -4.0, 16.0), sensor_detectable_fraction=0.4),
                Obstacle(kind="gondola", box_min_m=(24.0, -16.0, 44.0), box_max_m=(27.0, -14.0, 46.5), sensor_detectable_fraction=1.0),
            ),
            wind=WindParams(max_accel_mps2=1.2, slew_mps3=0.5, resample_interval_s=(4.0, 10.0)),
            battery_full_duration_s=310.0,
            home_point_m=(17.0, -24.0, 0.0),
            standoff_distance_m=7.0,
            boundary_margin_m=12.0,
            seed=33,
        )
    else:
        raise KeyError(f"unknown stock scenario {name!r}; choose from {STOCK_NAMES}")
    return populate_defects(spec)


def stock_document(name: str) -> str:
    return emit_scenario(build_stock(name))


def load_stock(name: str) -> ScenarioSpec:
    """Load the shipped scenario file (falls back to building it in code)."""
    try:
        text = resources.files("safespect.data").joinpath(f"{name}.scenario.json").read_text()
    except FileNotFoundError:
        return build_stock(name)
    return parse_scenario(text)
