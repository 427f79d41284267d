import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safespect import mission as ms
from safespect.autopilot import AutopilotState, PathPlan, Waypoint, generate_path
from safespect.engine import EngineConfig
from safespect.flightsim import DroneState
from safespect.geometry import point_segment_distance, vdist
from safespect.stock import build_stock

CFG = EngineConfig()


def drone_at(pos, yaw=math.pi / 2.0):
    return DroneState(pos_true=pos, pos_est=pos, yaw=yaw, airborne=True)


@pytest.fixture(scope="module")
def spec():
    return build_stock("short_a")


@pytest.fixture(scope="module")
def plan(spec):
    return generate_path(spec, CFG)


class TestCamera:
    def test_center_pixel_is_forward(self):
        s = drone_at((5.0, -7.0, 10.0), yaw=0.3)
        origin, direction = ms.pixel_ray(s, (0.5, 0.5), CFG)
        assert origin == s.pos_true
        assert direction == pytest.approx((math.cos(0.3), math.sin(0.3), 0.0))

    def test_horizontal_edge_matches_half_fov(self):
        # the ray through pixel x=1 deviates from forward by exactly hfov/2
        s = drone_at((0.0, 0.0, 5.0), yaw=0.0)
        _, d = ms.pixel_ray(s, (1.0, 0.5), CFG)
        angle = math.atan2(abs(d[1]), d[0])
        assert angle == pytest.approx(CFG.camera_hfov_rad / 2.0)

    def test_behind_camera_projects_to_none(self):
        s = drone_at((5.0, -7.0, 10.0), yaw=math.pi / 2.0)
        assert ms.project_to_pixel(s, (5.0, -20.0, 10.0), CFG) is None

    @settings(max_examples=100, deadline=None)
    @given(
        px=st.floats(0.05, 0.95),
        py=st.floats(0.05, 0.95),
        t=st.floats(0.5, 40.0),
        yaw=st.floats(-3.1, 3.1),
    )
    def test_project_inverts_pixel_ray(self, px, py, t, yaw):
        s = drone_at((2.0, -9.0, 7.0), yaw=yaw)
        origin, d = ms.pixel_ray(s, (px, py), CFG)
        point = tuple(origin[i] + t * d[i] for i in range(3))
        back = ms.project_to_pixel(s, point, CFG)
        assert back is not None
        assert back == pytest.approx((px, py), abs=1e-9)


class TestMarkDefect:
    def test_ray_plane_hand_oracle(self, spec):
        # camera 7 m off the facade looking straight at it: hit point is the
        # camera position dropped onto the facade plane (y = 0)
        s = drone_at((5.0, -7.0, 10.0), yaw=math.pi / 2.0)
        mark = ms.mark_defect(s, (0.5, 0.5), spec, CFG)
        assert mark.hit_world == pytest.approx((5.0, 0.0, 10.0))
        assert mark.hit_uv == pytest.approx((5.0, 10.0))

    def test_hit_on_known_defect(self, spec):
        d0 = spec.defects[0]
        from safespect.scenario import facade_to_world

        target = facade_to_world(spec, *d0.center_uv_m)
        eye = facade_to_world(spec, d0.center_uv_m[0], d0.center_uv_m[1], 7.0)
        s = drone_at(eye, yaw=math.pi / 2.0)
        pixel = ms.project_to_pixel(s, target, CFG)
        mark = ms.mark_defect(s, pixel, spec, CFG)
        assert mark.matched_defect == 0

    def test_miss_off_facade(self, spec):
        # looking away from the building: parallel/backward ray, no hit
        s = drone_at((5.0, -7.0, 10.0), yaw=-math.pi / 2.0)
        mark = ms.mark_defect(s, (0.5, 0.5), spec, CFG)
        assert mark.hit_world is None and mark.matched_defect is None

    def test_facade_hit_without_defect_is_false_mark(self, spec):
        # hit a facade point farther than every defect radius
        far = min(
            ((u, v) for u in (0.5, 19.5) for v in (0.5, 23.5)),
            key=lambda uv: -min(
                math.hypot(uv[0] - d.center_uv_m[0], uv[1] - d.center_uv_m[1]) - d.radius_m
                for d in spec.defects
            ),
        )
        from safespect.scenario import facade_to_world

        eye = facade_to_world(spec, far[0], far[1], 7.0)
        s = drone_at(eye, yaw=math.pi / 2.0)
        pixel = ms.project_to_pixel(s, facade_to_world(spec, *far), CFG)
        mark = ms.mark_defect(s, pixel, spec, CFG)
        assert mark.hit_uv is not None
        assert mark.matched_defect is None


class TestScoring:
    def test_score_counts(self, spec):
        marks = [
            ms.Mark(time_s=1.0, camera_pixel=(0.5, 0.5), hit_uv=(1, 1), hit_world=(1, 0, 1), matched_defect=0),
            ms.Mark(time_s=2.0, camera_pixel=(0.5, 0.5), hit_uv=(1, 1), hit_world=(1, 0, 1), matched_defect=0),
            ms.Mark(time_s=3.0, camera_pixel=(0.5, 0.5), hit_uv=(2, 2), hit_world=(2, 0, 2), matched_defect=None),
        ]
        score = ms.score_marks(marks, spec)
        assert score["matched"] == 1
        assert score["false_marks"] == 1
        assert score["marked_pct"] == pytest.approx(100.0 / len(spec.defects))


class TestCoverage:
    def test_pause_completion_covers(self, plan):
        c = ms.CoverageMap.empty(len(plan.waypoints))
        s = drone_at(plan.waypoints[4].pos)
        a = AutopilotState(engaged=True, current_index=4)
        out = ms.update_coverage(c, s, a, plan, CFG, CFG.dt, pause_completed=[4])
        assert out.covered[4] and sum(out.covered) == 1

    def test_manual_dwell_requires_contiguous_hold(self, plan):
        c = ms.CoverageMap.empty(len(plan.waypoints))
        s = drone_at(plan.waypoints[2].pos)
        idle = AutopilotState()
        ticks_needed = round(CFG.hold_time_s / CFG.dt)
        for _ in range(ticks_needed - 1):
            c = ms.update_coverage(c, s, idle, plan, CFG, CFG.dt)
        assert not c.covered[2]
        # leaving the hold radius resets the dwell clock
        away = drone_at((plan.waypoints[2].pos[0] + 2.0,) + plan.waypoints[2].pos[1:])
        c = ms.update_coverage(c, away, idle, plan, CFG, CFG.dt)
        assert c.dwell[2] == 0.0
        for _ in range(ticks_needed):
            c = ms.update_coverage(c, s, idle, plan, CFG, CFG.dt)
        assert c.covered[2]

    def test_fraction(self):
        c = ms.CoverageMap(covered=(True, False, True, False), dwell=(0.0,) * 4)
        assert c.fraction == 0.5


class TestPathDeviation:
    def test_zero_on_exact_track(self, plan):
        track = [w.pos for w in plan.waypoints]
        assert ms.path_deviation(plan, track) == 0.0

    def test_uniform_offset_hand_value(self, plan):
        track = [(w.pos[0], w.pos[1] - 1.5, w.pos[2]) for w in plan.waypoints]
        assert ms.path_deviation(plan, track) == pytest.approx(1.5)

    def test_short_track_raises(self, plan):
        with pytest.raises(ms.EmptyTrack):
            ms.path_deviation(plan, [(0.0, 0.0, 0.0)])

    def test_matches_brute_force_oracle(self):
        # independent oracle: dense sampling of every segment
        rng = random.Random(42)
        for _ in range(20):
            wps = tuple(
                Waypoint(pos=(rng.uniform(0, 30), rng.uniform(0, 30), rng.uniform(0, 30)), layer=0, facade_uv=(0.0, 0.0))
                for _ in range(5)
            )
            plan = PathPlan(waypoints=wps, cruise_speed=2.0, pause_duration=2.0, standoff=7.0)
            track = [
                (rng.uniform(0, 30), rng.uniform(0, 30), rng.uniform(0, 30)) for _ in range(8)
            ]
            got = ms.path_deviation(plan, track)
            total = 0.0
            for wp in wps:
                best = math.inf
                for a, b in zip(track, track[1:]):
                    for k in range(1001):
                        t = k / 1000.0
                        q = tuple(a[i] + t * (b[i] - a[i]) for i in range(3))
                        best = min(best, vdist(wp.pos, q))
                total += best
            assert got == pytest.approx(total / len(wps), abs=1e-3)


class TestPointSegment:
    @settings(max_examples=100, deadline=None)
    @given(
        data=st.tuples(*[st.floats(-10, 10) for _ in range(9)]),
    )
    def test_matches_dense_sampling(self, data):
        p, a, b = data[0:3], data[3:6], data[6:9]
        got = point_segment_distance(p, a, b)
        best = min(
            vdist(p, tuple(a[i] + (k / 400.0) * (b[i] - a[i]) for i in range(3)))
            for k in range(401)
        )
        assert got <= best + 1e-9
        assert got == pytest.approx(best, abs=1e-3)


class TestSart:
    def test_hand_arithmetic(self):
        # U=15, D=9, S=14 -> 15 - (9 - 14) = 20
        inputs = ms.SartInputs(demand=(3, 3, 3), supply=(4, 4, 3, 3), understanding=(5, 5, 5))
        assert ms.sart_score(inputs) == 20

    def test_boundaries(self):
        lo = ms.SartInputs(demand=(7, 7, 7), supply=(1, 1, 1, 1), understanding=(1, 1, 1))
        hi = ms.SartInputs(demand=(1, 1, 1), supply=(7, 7, 7, 7), understanding=(7, 7, 7))
        assert ms.sart_score(lo) == 3 - (21 - 4)  # -14
        assert ms.sart_score(hi) == 21 - (3 - 28)  # 46

    def test_out_of_range_rejected(self):
        with pytest.raises(ms.RangeError):
            ms.sart_score(ms.SartInputs(demand=(0, 3, 3), supply=(4, 4, 3, 3), understanding=(5, 5, 5)))
        with pytest.raises(ms.RangeError):
            ms.sart_score(ms.SartInputs(demand=(3, 3, 3), supply=(4, 4, 3, 8), understanding=(5, 5, 5)))
