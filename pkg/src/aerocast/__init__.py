"""Seamless mobile-drone transitions for aerial multicast.

LCRT multicast trees, overlap-graph path search, ETTA trajectory planning
and a time-stepped delivery simulator.
"""

from .geometry import (
    CoverageInterval,
    IntersectionCircle,
    Point3,
    SphereCoverage,
    boundary_point_toward,
    coverage_intervals,
    eligible_intersection,
    euclidean_distance,
    exit_point,
    is_segment_covered,
    point_at,
    segment_sphere_intersections,
    sphere_intersection_circle,
)
from .kernels import BACKEND
from .lcrt import DroneNode, MulticastTree, build_lcrt_tree, compute_levels
from .overlap import OverlapGraph, build_overlap_graph, min_weight_path, to_dot
from .planner import (
    Reason,
    SeamlessVerdict,
    Trajectory,
    TransitionRequest,
    check_straight_seamless,
    plan,
    plan_non_overlapping,
    plan_overlapping,
    transit_point,
)
from .simulator import Metrics, MobileSpec, PacketRecord, Policy, Scenario, amd, amt, run, simulate

__version__ = "0.1.0"
