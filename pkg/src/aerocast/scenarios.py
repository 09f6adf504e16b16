"""Ready-made scenarios: the 9-drone small-group layout and random topologies."""

from __future__ import annotations

import numpy as np

from .geometry import Point3
from .lcrt import DroneNode
from .simulator import DEFAULT_RADIUS, MobileSpec, Policy, Scenario


def small_group(policy: Policy | str = Policy.ETTA, traffic_rate: float = 512_000.0, **overrides) -> Scenario:
    """Nine drones, one mobile flying 102.6 m at 10 m/s across a coverage gap.

    Drone 3 serves the mobile (6) at the start and drone 4 covers its
    destination. 3 and 4 sit 1180 m apart, so their spheres leave a 60 m
    gap on the straight line; the source (0) hovers 600 m above the gap
    and overlaps both without covering the line.
    """
    r = DEFAULT_RADIUS
    a = Point3(538.7, 0.0, 0.0)
    b = Point3(641.3, 0.0, 0.0)
    drones = (
        DroneNode(0, (590.0, 0.0, 600.0), is_source=True),
        DroneNode(1, (150.0, 0.0, 450.0)),
        DroneNode(2, (1030.0, 0.0, 450.0)),
        DroneNode(3, (0.0, 0.0, 0.0)),
        DroneNode(4, (1180.0, 0.0, 0.0)),
        DroneNode(5, (590.0, 300.0, 900.0)),
        DroneNode(6, a),
        DroneNode(7, (1400.0, 0.0, -300.0)),
        DroneNode(8, (-300.0, 0.0, 0.0)),
    )
    mobile = MobileSpec(6, a, b, speed=10.0, start_time=20.0)
    params = dict(
        drones=drones,
        radius=r,
        traffic_rate=traffic_rate,
        mobiles=(mobile,),
        policy=Policy(policy),
        scenario_id="small-group",
    )
    params.update(overrides)
    return Scenario(**params)


def random_drones(rng: np.random.Generator, n: int, r: float, extent: float | None = None) -> list[DroneNode]:
    """``n`` drones grown as a random connected cloud (each new drone within r of an earlier one)."""
    pts = [np.zeros(3)]
    while len(pts) < n:
        anchor = pts[rng.integers(len(pts))]
        v = rng.normal(size=3)
        v *= rng.uniform(0.3, 1.0) * r / np.linalg.norm(v)
        cand = anchor + v
        if extent is not None and np.abs(cand).max() > extent:
            continue
        pts.append(cand)
    return [DroneNode(i, tuple(map(float, p)), is_source=(i == 0)) for i, p in enumerate(pts)]


def random_point_in_ball(rng: np.random.Generator, center, r: float) -> Point3:
    v = rng.normal(size=3)
    v *= r * rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(v)
    return Point3(*(float(c + x) for c, x in zip(center, v)))
