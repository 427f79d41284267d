"""Small 3D vector / box / ray helpers shared by the simulation modules.

Everything works on plain float tuples so state snapshots stay hashable and
trivially serializable. World frame is right-handed, Z-up, meters.
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]

ZERO3: Vec3 = (0.0, 0.0, 0.0)


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vnorm(a: Vec3) -> float:
    return math.sqrt(vdot(a, a))


def vdist(a: Vec3, b: Vec3) -> float:
    return vnorm(vsub(a, b))


def vunit(a: Vec3) -> Vec3:
    n = vnorm(a)
    if n == 0.0:
        return ZERO3
    return (a[0] / n, a[1] / n, a[2] / n)


def vclamp_norm(a: Vec3, limit: float) -> Vec3:
    """Scale `a` down so its norm does not exceed `limit`."""
    n = vnorm(a)
    if n <= limit or n == 0.0:
        return a
    return vscale(a, limit / n)


def hnorm(a: Vec3) -> float:
    """Horizontal (XY) magnitude."""
    return math.hypot(a[0], a[1])


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


class Aabb:
    """Axis-aligned box given by min/max corners."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Vec3, hi: Vec3):
        self.lo = lo
        self.hi = hi

    def contains(self, p: Vec3) -> bool:
        return all(self.lo[i] <= p[i] <= self.hi[i] for i in range(3))

    def inflate(self, margin: float) -> "Aabb":
        return Aabb(
            (self.lo[0] - margin, self.lo[1] - margin, self.lo[2] - margin),
            (self.hi[0] + margin, self.hi[1] + margin, self.hi[2] + margin),
        )

    def scaled_about_center(self, factor: float) -> "Aabb":
        cx = (self.lo[0] + self.hi[0]) / 2.0
        cy = (self.lo[1] + self.hi[1]) / 2.0
        cz = (self.lo[2] + self.hi[2]) / 2.0
        hx = (self.hi[0] - self.lo[0]) / 2.0 * factor
        hy = (self.hi[1] - self.lo[1]) / 2.0 * factor
        hz = (self.hi[2] - self.lo[2]) / 2.0 * factor
        return Aabb((cx - hx, cy - hy, cz - hz), (cx + hx, cy + hy, cz + hz))


def ray_aabb_distance(origin: Vec3, direction: Vec3, box: Aabb) -> float:
    """Distance along a unit ray to the box surface, or inf on a miss.

    Returns 0.0 when the origin is already inside the box.
    """
    tmin = 0.0
    tmax = math.inf
    for i in range(3):
        o, d = origin[i], direction[i]
        if abs(d) < 1e-12:
            if o < box.lo[i] or o > box.hi[i]:
                return math.inf
            continue
        t1 = (box.lo[i] - o) / d
        t2 = (box.hi[i] - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
        if tmin > tmax:
            return math.inf
    return tmin


def point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> float:
    """Euclidean distance from a point to the segment [a, b]."""
    ab = vsub(b, a)
    denom = vdot(ab, ab)
    if denom == 0.0:
        return vdist(p, a)
    t = vdot(vsub(p, a), ab) / denom
    t = min(1.0, max(0.0, t))
    return vdist(p, vadd(a, vscale(ab, t)))
