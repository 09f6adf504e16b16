"""3D primitives for coverage spheres and straight segments.

Points are plain ``Point3`` tuples and scalar math stays in Python floats;
only the many-sphere coverage sweep goes through the array kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import Contained, DegenerateRay, Disjoint, NoIntersection, Tangent

#: boundary-membership tolerance in meters
EPS = 1e-9
#: interval-gap tolerance in segment-parameter units
EPS_T = 1e-9


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    def __sub__(self, other):
        return Point3(self.x - other[0], self.y - other[1], self.z - other[2])

    def __add__(self, other):
        return Point3(self.x + other[0], self.y + other[1], self.z + other[2])

    def scale(self, k: float) -> "Point3":
        return Point3(self.x * k, self.y * k, self.z * k)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1] + self.z * other[2]

    def norm(self) -> float:
        return math.sqrt(self.dot(self))


def as_point(p: Iterable[float]) -> Point3:
    if isinstance(p, Point3):
        return p
    x, y, z = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValueError(f"non-finite coordinates: {(x, y, z)}")
    return Point3(x, y, z)


@dataclass(frozen=True)
class SphereCoverage:
    """Omnidirectional transmission range of one transmitter."""

    center: Point3
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    def contains(self, p, tol: float = EPS) -> bool:
        return euclidean_distance(self.center, p) <= self.radius + tol


class CoverageInterval(NamedTuple):
    t_in: float
    t_out: float


@dataclass(frozen=True)
class IntersectionCircle:
    center: Point3
    radius: float
    axis: Point3


def euclidean_distance(p, q) -> float:
    return math.dist(p, q)


def point_at(a, b, t: float) -> Point3:
    """Affine interpolation ``a + t (b - a)``."""
    return Point3(
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    )


def _line_roots(a, b, center, radius):
    # numerically stable quadratic; None when the line misses the sphere
    d = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    f = (a[0] - center[0], a[1] - center[1], a[2] - center[2])
    qa = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    if qa == 0.0:
        return None
    qb = 2.0 * (f[0] * d[0] + f[1] * d[1] + f[2] * d[2])
    qc = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] - radius * radius
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return None
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    if q == 0.0:
        return 0.0, 0.0
    t1, t2 = q / qa, qc / q
    return (t1, t2) if t1 <= t2 else (t2, t1)


def segment_sphere_intersections(a, b, s: SphereCoverage) -> list[float]:
    """Parameters ``t`` in [0, 1] where segment a->b crosses the sphere boundary.

    Roots within ``EPS_T`` outside [0, 1] are clipped onto the segment so that
    endpoints lying on the boundary are not lost to rounding.
    """
    roots = _line_roots(a, b, s.center, s.radius)
    if roots is None:
        return []
    ts = []
    for t in roots:
        if -EPS_T <= t <= 1.0 + EPS_T:
            t = min(max(t, 0.0), 1.0)
            if not ts or abs(t - ts[-1]) > 1e-12:
                ts.append(t)
    return ts


def exit_point(a, b, s_origin: SphereCoverage, toward) -> Point3:
    """Boundary crossing of a->b on ``s_origin`` nearest to ``toward``."""
    ts = segment_sphere_intersections(a, b, s_origin)
    if not ts:
        raise NoIntersection(f"segment {a}->{b} misses sphere at {s_origin.center}")
    pts = [point_at(a, b, t) for t in ts]
    return min(pts, key=lambda p: euclidean_distance(p, toward))


def boundary_point_toward(a, s: SphereCoverage) -> Point3:
    """Boundary point on the ray from ``a`` through the sphere center.

    Outside (or on) the sphere this is the first crossing; inside, the ray is
    followed past the center to the far side.
    """
    a = as_point(a)
    to_center = s.center - a
    dist = to_center.norm()
    if dist <= EPS:
        raise DegenerateRay(f"point {a} coincides with sphere center")
    step = dist - s.radius if dist >= s.radius else dist + s.radius
    return a + to_center.scale(step / dist)


def sphere_intersection_circle(s1: SphereCoverage, s2: SphereCoverage) -> IntersectionCircle:
    offset = s2.center - s1.center
    d = offset.norm()
    r1, r2 = s1.radius, s2.radius
    if d <= EPS:
        raise Contained("concentric spheres")
    if d > r1 + r2 + EPS:
        raise Disjoint(f"spheres {d:.6g} apart, radii {r1:.6g}+{r2:.6g}")
    if abs(d - (r1 + r2)) <= EPS or abs(d - abs(r1 - r2)) <= EPS:
        raise Tangent(f"spheres touch at a single point (d={d:.6g})")
    if d < abs(r1 - r2):
        raise Contained(f"one sphere lies inside the other (d={d:.6g})")
    axis = offset.scale(1.0 / d)
    h = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    rho = math.sqrt(max(r1 * r1 - h * h, 0.0))
    return IntersectionCircle(s1.center + axis.scale(h), rho, axis)


def _in_plane(v: Point3, axis: Point3) -> Point3:
    return v - axis.scale(v.dot(axis))


def eligible_intersection(s1: SphereCoverage, s2: SphereCoverage, target) -> Point3:
    """Point of the two spheres' intersection circle nearest to ``target``.

    When ``target`` sits on the circle axis every circle point is equally near;
    the +y direction (then +z) projected into the circle plane breaks the tie.
    """
    circle = sphere_intersection_circle(s1, s2)
    radial = _in_plane(as_point(target) - circle.center, circle.axis)
    n = radial.norm()
    if n <= EPS:
        for fallback in (Point3(0.0, 1.0, 0.0), Point3(0.0, 0.0, 1.0)):
            radial = _in_plane(fallback, circle.axis)
            n = radial.norm()
            if n > 1e-9:
                break
    return circle.center + radial.scale(circle.radius / n)


def _as_arrays(spheres: Sequence[SphereCoverage]):
    centers = np.array([s.center for s in spheres], dtype=np.float64).reshape(-1, 3)
    radii = np.array([s.radius for s in spheres], dtype=np.float64)
    return centers, radii


def coverage_intervals(a, b, spheres: Sequence[SphereCoverage], tol: float = EPS_T) -> list[CoverageInterval]:
    """Merged parameter intervals of segment a->b lying inside any sphere.

    Intervals separated by at most ``tol`` are fused.
    """
    if not spheres:
        return []
    a = as_point(a)
    b = as_point(b)
    if a == b:
        inside = any(s.contains(a) for s in spheres)
        return [CoverageInterval(0.0, 1.0)] if inside else []
    centers, radii = _as_arrays(spheres)
    roots = kernels.segment_sphere_roots(
        np.array(a, dtype=np.float64), np.array(b, dtype=np.float64), centers, radii
    )
    raw = []
    for t1, t2 in roots:
        if t1 != t1:
            continue
        lo, hi = max(t1, 0.0), min(t2, 1.0)
        if hi > lo:
            raw.append((lo, hi))
    raw.sort()
    merged: list[list[float]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [CoverageInterval(lo, hi) for lo, hi in merged]


def is_segment_covered(a, b, spheres: Sequence[SphereCoverage], tol: float = EPS_T) -> bool:
    """True when every point of a->b is inside some sphere, up to gaps of ``tol``."""
    ivs = coverage_intervals(a, b, spheres, tol)
    return len(ivs) == 1 and ivs[0].t_in <= tol and ivs[0].t_out >= 1.0 - tol


def uncovered_length(a, b, spheres: Sequence[SphereCoverage]) -> float:
    """Total length (meters) of a->b outside every sphere."""
    length = euclidean_distance(a, b)
    covered = sum(iv.t_out - iv.t_in for iv in coverage_intervals(a, b, spheres, tol=0.0))
    return max(0.0, (1.0 - covered) * length)
