"""ETTA transition planning.

A mobile drone moving from A (served by F_A) to B (served by F_B) first
tries the straight line. Overlapping forwarders get a single transit point
T on F_B's boundary; non-overlapping ones are bridged by a chain of
eligible intersections (EIs) along the min-weight overlap-graph path.

Every leg of a returned trajectory is checked against the transmitter
spheres. Where the cheap construction cannot be shown covered, the planner
substitutes EIs between consecutive spheres, which is always covered by
sphere convexity, and marks the trajectory ``fallback=True``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import DegenerateGeometry, GeometryError, InvalidRequest, NoPath, PlanningFailure
from .geometry import (
    EPS,
    EPS_T,
    Point3,
    SphereCoverage,
    as_point,
    boundary_point_toward,
    coverage_intervals,
    eligible_intersection,
    euclidean_distance,
    is_segment_covered,
    point_at,
    segment_sphere_intersections,
)
from .lcrt import DroneNode, MulticastTree
from .overlap import build_overlap_graph, min_weight_path, overlapping

log = logging.getLogger(__name__)


class Reason(str, Enum):
    WITHIN_ENTRY_EXIT = "WithinEntryExit"
    COVERED_BY_THIRD = "CoveredByThirdForwarder"
    NOT_SEAMLESS = "NotSeamless"


@dataclass(frozen=True)
class SeamlessVerdict:
    seamless: bool
    reason: Reason
    c: Optional[Point3] = None
    d: Optional[Point3] = None
    t_c: Optional[float] = None
    t_d: Optional[float] = None
    third: Optional[int] = None


@dataclass(frozen=True)
class TransitionRequest:
    mobile: int
    origin: Point3
    destination: Point3
    origin_forwarder: int
    destination_forwarder: int

    def __post_init__(self):
        object.__setattr__(self, "origin", as_point(self.origin))
        object.__setattr__(self, "destination", as_point(self.destination))


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple
    # legs[i] covers waypoints[i] -> waypoints[i + 1]
    legs: tuple
    method: str = "straight"
    fallback: bool = False
    path: tuple = ()

    @property
    def total_length(self) -> float:
        w = self.waypoints
        return sum(euclidean_distance(p, q) for p, q in zip(w, w[1:]))

    @property
    def extra_distance(self) -> float:
        return max(0.0, self.total_length - euclidean_distance(self.waypoints[0], self.waypoints[-1]))


def _positions(nodes: Sequence[DroneNode]) -> dict[int, Point3]:
    return {d.id: d.position for d in nodes}


def _straight_verdict(a, b, sa: SphereCoverage, sb: SphereCoverage, others, r) -> SeamlessVerdict:
    # B inside F_A or A inside F_B: the segment lies in one ball
    if sa.contains(b) or sb.contains(a):
        return SeamlessVerdict(True, Reason.WITHIN_ENTRY_EXIT, t_c=1.0, t_d=0.0)
    ts_c = segment_sphere_intersections(a, b, sa)
    ts_d = segment_sphere_intersections(a, b, sb)
    if not ts_c or not ts_d:
        raise DegenerateGeometry("segment does not cross both coverage boundaries")
    t_c = min(ts_c, key=lambda t: euclidean_distance(point_at(a, b, t), sb.center))
    t_d = min(ts_d, key=lambda t: euclidean_distance(point_at(a, b, t), sa.center))
    c, d = point_at(a, b, t_c), point_at(a, b, t_d)
    if t_c >= t_d:
        return SeamlessVerdict(True, Reason.WITHIN_ENTRY_EXIT, c, d, t_c, t_d)
    for fid, fpos in others:
        if euclidean_distance(fpos, c) <= r and euclidean_distance(fpos, d) <= r:
            return SeamlessVerdict(True, Reason.COVERED_BY_THIRD, c, d, t_c, t_d, third=fid)
    return SeamlessVerdict(False, Reason.NOT_SEAMLESS, c, d, t_c, t_d)


def check_straight_seamless(req: TransitionRequest, forwarders: Sequence[DroneNode], r: float) -> SeamlessVerdict:
    """Seamlessness test for the straight line A->B.

    C is where A->B leaves F_A, D where it enters F_B. The line is covered
    when the two balls' stretches meet (``d_AB <= d_AC + d_DB``, checked as
    ``t_C >= t_D``) or when some transmitter is within r of both C and D.
    """
    pos = _positions(forwarders)
    sa = SphereCoverage(pos[req.origin_forwarder], r)
    sb = SphereCoverage(pos[req.destination_forwarder], r)
    others = sorted(pos.items())
    return _straight_verdict(req.origin, req.destination, sa, sb, others, r)


def transit_point(a, f_b: SphereCoverage) -> Point3:
    """T: nearest crossing of the line A->F_B with F_B's boundary."""
    return boundary_point_toward(a, f_b)


class _Planner:
    def __init__(self, transmitters: Sequence[DroneNode], r: float):
        self.r = r
        self.pos = _positions(transmitters)
        self.ids = sorted(self.pos)
        self.spheres = {i: SphereCoverage(self.pos[i], r) for i in self.ids}

    def sphere(self, i):
        return self.spheres[i]

    def annotate(self, p, q) -> tuple:
        """Transmitters whose sphere overlaps leg p->q with positive length."""
        out = []
        for i in self.ids:
            if coverage_intervals(p, q, [self.spheres[i]], tol=0.0):
                out.append(i)
        return tuple(out)

    def leg_covered(self, p, q) -> bool:
        return is_segment_covered(p, q, list(self.spheres.values()))

    def finish(self, waypoints, method, fallback=False, path=()) -> Trajectory:
        pts = [waypoints[0]]
        for w in waypoints[1:]:
            if euclidean_distance(w, pts[-1]) > EPS:
                pts.append(w)
        if len(pts) == 1:
            pts.append(waypoints[-1])
        for p, q in zip(pts, pts[1:]):
            if not self.leg_covered(p, q):
                raise PlanningFailure(f"leg {p}->{q} is not covered by any transmitter chain")
        legs = tuple(self.annotate(p, q) for p, q in zip(pts, pts[1:]))
        return Trajectory(tuple(pts), legs, method, fallback, tuple(path))

    def straight_verdict(self, a, b, fa, fb) -> SeamlessVerdict:
        others = [(i, self.pos[i]) for i in self.ids]
        return _straight_verdict(a, b, self.sphere(fa), self.sphere(fb), others, self.r)

    def chain(self, a, b, path: Sequence[int]) -> Trajectory:
        """EI chain along an overlap-graph path [F_A, TF_1 .. TF_n, F_B]."""
        fa, fb = path[0], path[-1]
        tfs = list(path[1:-1])
        if not tfs:
            ei = eligible_intersection(self.sphere(fa), self.sphere(fb), b)
            return self.finish([a, ei, b], "ei-chain", fallback=True, path=path)
        eis = [eligible_intersection(self.sphere(u), self.sphere(v), b) for u, v in zip(tfs, tfs[1:])]
        eis.append(eligible_intersection(self.sphere(tfs[-1]), self.sphere(fb), b))
        fallback = False
        try:
            straight = self.straight_verdict(a, eis[0], fa, tfs[0]).seamless
        except (DegenerateGeometry, GeometryError):
            straight = False
        if straight:
            head = [a]
        else:
            try:
                t = transit_point(a, self.sphere(tfs[0]))
                ok = self.leg_covered(a, t) and self.leg_covered(t, eis[0])
            except GeometryError:
                ok = False
            if ok:
                head = [a, t]
            else:
                log.debug("transit point leg uncovered, bridging F_A->TF_1 with an EI")
                head = [a, eligible_intersection(self.sphere(fa), self.sphere(tfs[0]), b)]
                fallback = True
        return self.finish(head + eis + [b], "ei-chain", fallback=fallback, path=path)


def _check_request(req: TransitionRequest, pos, r):
    for fid in (req.origin_forwarder, req.destination_forwarder):
        if fid not in pos:
            raise InvalidRequest(f"forwarder {fid} is not a transmitter")
    if euclidean_distance(req.origin, pos[req.origin_forwarder]) > r + EPS:
        raise InvalidRequest("origin is outside its forwarder's coverage")
    if euclidean_distance(req.destination, pos[req.destination_forwarder]) > r + EPS:
        raise InvalidRequest("destination is outside its forwarder's coverage")


def plan_overlapping(req: TransitionRequest, forwarders: Sequence[DroneNode], r: float) -> Trajectory:
    """Straight line if seamless, else A->T->B; EI bridge if T fails the check."""
    pl = _Planner(forwarders, r)
    _check_request(req, pl.pos, r)
    a, b = req.origin, req.destination
    fa, fb = req.origin_forwarder, req.destination_forwarder
    path = (fa, fb) if fa != fb else (fa,)
    if fa == fb or pl.straight_verdict(a, b, fa, fb).seamless:
        return pl.finish([a, b], "straight", path=path)
    try:
        t = transit_point(a, pl.sphere(fb))
    except GeometryError:
        t = None
    if t is not None and pl.leg_covered(a, t) and pl.leg_covered(t, b):
        return pl.finish([a, t, b], "transit", path=path)
    log.debug("A->T->B not covered for mobile %s, using EI bridge", req.mobile)
    try:
        return pl.chain(a, b, [fa, fb])
    except GeometryError as exc:
        raise PlanningFailure(f"no seamless trajectory between {fa} and {fb}: {exc}") from exc


def plan_non_overlapping(req: TransitionRequest, tree: MulticastTree, drones: Sequence[DroneNode], r: float) -> Trajectory:
    transmitters = _tx_nodes(tree, drones)
    pl = _Planner(transmitters, r)
    _check_request(req, pl.pos, r)
    graph = build_overlap_graph(tree, drones, r)
    try:
        path = min_weight_path(graph, req.origin_forwarder, req.destination_forwarder)
    except NoPath as exc:
        raise PlanningFailure(str(exc)) from exc
    try:
        return pl.chain(req.origin, req.destination, path)
    except GeometryError as exc:
        raise PlanningFailure(f"eligible-intersection chain failed on path {path}: {exc}") from exc


def _tx_nodes(tree: MulticastTree, drones: Sequence[DroneNode]) -> list[DroneNode]:
    tx = set(tree.transmitters)
    return [d for d in drones if d.id in tx]


def plan(req: TransitionRequest, tree: MulticastTree, drones: Sequence[DroneNode], r: float) -> Trajectory:
    """Algorithm entry point: dispatch on whether F_A and F_B overlap."""
    pos = {d.id: d.position for d in drones}
    fa, fb = req.origin_forwarder, req.destination_forwarder
    if fa not in pos or fb not in pos:
        raise InvalidRequest(f"unknown forwarder {fa if fa not in pos else fb}")
    if fa == fb or overlapping(pos[fa], pos[fb], r):
        return plan_overlapping(req, _tx_nodes(tree, drones), r)
    return plan_non_overlapping(req, tree, drones, r)


def leg_coverage_ok(traj: Trajectory, spheres: Sequence[SphereCoverage], gap_m: float = 1e-6) -> bool:
    """Per-leg coverage with a gap tolerance given in meters."""
    for p, q in zip(traj.waypoints, traj.waypoints[1:]):
        length = euclidean_distance(p, q)
        tol = gap_m / length if length > 0 else EPS_T
        if not is_segment_covered(p, q, spheres, tol=tol):
            return False
    return True
