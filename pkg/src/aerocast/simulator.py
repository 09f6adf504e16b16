"""Time-stepped multicast delivery over an LCRT tree with mobile receivers.

Channel model: every transmitter (source or forwarder) serves one FIFO
queue with drop-tail at ``queue_capacity`` packets, spending
``packet_size / channel_rate`` seconds per packet; each hop then adds
``per_hop_latency``. There is no MAC contention between transmitters.

A static receiver gets a packet when its tree parent transmits it. A mobile
receiver hears a transmitter's copy only if, during the step that copy
arrives, the transmitter is serving it and it is within range:

* ``nohandover``: the mobile flies the straight line and stays with its
  current transmitter while in range; after losing it, it re-attaches to
  the nearest transmitter whose coverage it re-enters.
* ``etta``: the mobile flies the planned trajectory and is served by every
  transmitter annotated on the leg it is on.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidScenario, NoData, PlanningFailure, Unreachable, Uncoverable
from .geometry import Point3, as_point, euclidean_distance
from .lcrt import DroneNode, MulticastTree, build_lcrt_tree
from .planner import TransitionRequest, Trajectory, plan

log = logging.getLogger(__name__)

#: seconds of simulated time after ``duration`` to let queues drain
DRAIN_S = 1.0
#: slack (m) on the reception range test; planned waypoints sit on boundaries
RECEIVE_TOL = 1e-6


def free_space_range(tx_dbm: float, rx_threshold_dbm: float, freq_hz: float) -> float:
    """Distance at which free-space path loss exhausts the link budget (m)."""
    c = 299_792_458.0
    budget_db = tx_dbm - rx_threshold_dbm
    return c / (4.0 * math.pi * freq_hz) * 10.0 ** (budget_db / 20.0)


# 15 dBm transmit, -80 dBm receive threshold at 2.4 GHz gives ~559 m
DEFAULT_RADIUS = 560.0


class Policy(str, Enum):
    NO_HANDOVER = "nohandover"
    ETTA = "etta"


@dataclass(frozen=True)
class MobileSpec:
    drone: int
    origin: Point3
    destination: Point3
    speed: float
    start_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "origin", as_point(self.origin))
        object.__setattr__(self, "destination", as_point(self.destination))


@dataclass(frozen=True)
class Scenario:
    drones: tuple
    radius: float = DEFAULT_RADIUS
    traffic_rate: float = 512_000.0
    packet_size: float = 8_000.0
    duration: float = 200.0
    timestep: float = 1e-3
    channel_rate: float = 54e6
    per_hop_latency: float = 2e-3
    mobiles: tuple = ()
    policy: Policy = Policy.ETTA
    seed: int = 0
    queue_capacity: int = 64
    scenario_id: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "drones", tuple(self.drones))
        object.__setattr__(self, "mobiles", tuple(self.mobiles))
        object.__setattr__(self, "policy", Policy(self.policy))

    def problems(self) -> list[str]:
        """Violated invariants, as human-readable strings."""
        out = []
        if not self.timestep > 0:
            out.append(f"timestep must be > 0 (got {self.timestep})")
        if not self.duration > 0:
            out.append(f"duration must be > 0 (got {self.duration})")
        if not self.radius > 0:
            out.append(f"radius must be > 0 (got {self.radius})")
        if not self.packet_size > 0:
            out.append(f"packet_size must be > 0 (got {self.packet_size})")
        if not self.traffic_rate > 0:
            out.append(f"traffic_rate must be > 0 (got {self.traffic_rate})")
        if not self.traffic_rate <= self.channel_rate:
            out.append(f"traffic_rate {self.traffic_rate} exceeds channel_rate {self.channel_rate}")
        if self.per_hop_latency < 0:
            out.append("per_hop_latency must be >= 0")
        if self.queue_capacity < 1:
            out.append("queue_capacity must be >= 1")
        ids = [d.id for d in self.drones]
        if len(set(ids)) != len(ids):
            out.append("duplicate drone ids")
        n_src = sum(d.is_source for d in self.drones)
        if n_src != 1:
            out.append(f"expected exactly one source, found {n_src}")
        by_id = {d.id: d for d in self.drones}
        seen = set()
        for m in self.mobiles:
            if m.drone not in by_id:
                out.append(f"mobile {m.drone} is not a drone in the scenario")
            elif by_id[m.drone].is_source:
                out.append(f"mobile {m.drone} is the source")
            if m.drone in seen:
                out.append(f"mobile {m.drone} listed twice")
            seen.add(m.drone)
            if not m.speed > 0:
                out.append(f"mobile {m.drone}: speed must be > 0")
            if m.origin == m.destination:
                out.append(f"mobile {m.drone}: origin equals destination")
            if m.start_time < 0:
                out.append(f"mobile {m.drone}: start_time must be >= 0")
        return out

    def check(self):
        probs = self.problems()
        if probs:
            raise InvalidScenario("; ".join(probs))

    @property
    def mobile_ids(self) -> frozenset:
        return frozenset(m.drone for m in self.mobiles)

    def initial_nodes(self) -> list[DroneNode]:
        """Drones with every mobile placed at its trajectory origin."""
        start = {m.drone: m.origin for m in self.mobiles}
        return [replace(d, position=start[d.id]) if d.id in start else d for d in self.drones]


@dataclass(frozen=True)
class PacketRecord:
    sequence: int
    sent_at: float
    # receiver id -> arrival time, or None when dropped / never delivered
    delivered_at: Mapping[int, Optional[float]]


@dataclass(frozen=True)
class Metrics:
    per_receiver_avg_delay: Mapping[int, float]
    per_receiver_throughput: Mapping[int, float]
    amd: float
    amt: float
    mobile_delivery_ratio: float
    mobile_extra_distance: float
    delivery_ratio: float
    mobile_amd: float = math.nan
    mobile_amt: float = math.nan
    no_data: tuple = ()
    emitted: int = 0


def build_tree(sc: Scenario) -> tuple[MulticastTree, list[DroneNode]]:
    nodes = sc.initial_nodes()
    try:
        tree = build_lcrt_tree(nodes, sc.radius, non_relaying=sc.mobile_ids)
    except (Unreachable, Uncoverable) as exc:
        raise InvalidScenario(str(exc)) from exc
    return tree, nodes


def destination_forwarder(tree: MulticastTree, nodes: Sequence[DroneNode], point, r: float) -> Optional[int]:
    """Nearest transmitter covering ``point`` (lowest id on ties)."""
    pos = {d.id: d.position for d in nodes}
    best = None
    for tid in sorted(tree.transmitters):
        d = euclidean_distance(pos[tid], point)
        if d <= r and (best is None or d < best[0]):
            best = (d, tid)
    return None if best is None else best[1]


def transition_request(sc: Scenario, m: MobileSpec, tree: MulticastTree, nodes) -> TransitionRequest:
    fb = destination_forwarder(tree, nodes, m.destination, sc.radius)
    if fb is None:
        raise PlanningFailure(f"mobile {m.drone}: destination is outside every transmitter's coverage")
    return TransitionRequest(m.drone, m.origin, m.destination, tree.parent[m.drone], fb)


def plan_mobile(sc: Scenario, m: MobileSpec, tree: MulticastTree, nodes) -> Trajectory:
    req = transition_request(sc, m, tree, nodes)
    return plan(req, tree, nodes, sc.radius)


def positions_along(waypoints, speed: float, start_time: float, times: np.ndarray) -> np.ndarray:
    """``(K, 3)`` positions of a constant-speed flight; parked before and after."""
    pts = np.asarray(waypoints, dtype=np.float64)
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    s = np.clip((times - start_time) * speed, 0.0, cum[-1])
    return np.column_stack([np.interp(s, cum, pts[:, i]) for i in range(3)])


def _leg_index(waypoints, speed, start_time, times) -> np.ndarray:
    pts = np.asarray(waypoints, dtype=np.float64)
    cum = np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))
    s = np.clip((times - start_time) * speed, 0.0, cum[-1])
    return np.minimum(np.searchsorted(cum, s, side="right"), len(cum) - 1)


@dataclass
class SimulationResult:
    scenario: Scenario
    tree: MulticastTree
    receivers: tuple
    sent: np.ndarray
    # (receivers, packets): arrival time; NaN dropped, +inf still in flight
    delivered: np.ndarray
    hops: dict
    trajectories: dict = field(default_factory=dict)
    metrics: Optional[Metrics] = None

    def records(self) -> list[PacketRecord]:
        out = []
        for p, t in enumerate(self.sent):
            col = self.delivered[:, p]
            out.append(PacketRecord(
                p, float(t),
                {rid: (float(v) if math.isfinite(v) else None) for rid, v in zip(self.receivers, col)},
            ))
        return out

    def counts(self, receiver: int) -> tuple[int, int, int]:
        """(delivered, dropped, in_flight) for one receiver."""
        row = self.delivered[self.receivers.index(receiver)]
        return int(np.isfinite(row).sum()), int(np.isnan(row).sum()), int(np.isposinf(row).sum())


def _receiver_stats(sent: np.ndarray, delivered: np.ndarray, packet_size: float, duration: float):
    ok = np.isfinite(delivered)
    n_ok = ok.sum(axis=1)
    delay_sum = np.where(ok, delivered - sent[None, :], 0.0).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        ad = np.where(n_ok > 0, delay_sum / np.maximum(n_ok, 1), np.nan)
    at = n_ok * packet_size / duration
    return ad, at, n_ok


def _mean_delay(ad: np.ndarray) -> float:
    have = ad[np.isfinite(ad)]
    if have.size == 0:
        raise NoData("no receiver got any packet")
    return float(have.mean())


def amd(records: Sequence[PacketRecord], receivers: Sequence[int]) -> float:
    """Mean over receivers of each receiver's mean packet delay.

    Only delivered packets enter a receiver's delay; receivers that got
    nothing are left out of the mean (and logged).
    """
    ad = []
    for rid in receivers:
        delays = [r.delivered_at[rid] - r.sent_at for r in records if r.delivered_at.get(rid) is not None]
        if delays:
            ad.append(sum(delays) / len(delays))
        else:
            log.warning("receiver %s has no delivered packets; excluded from AMD", rid)
    if not ad:
        raise NoData("no receiver got any packet")
    return sum(ad) / len(ad)


def amt(records: Sequence[PacketRecord], receivers: Sequence[int], duration: float, packet_size: float = 8_000.0) -> float:
    """Mean over receivers of delivered bits per second."""
    if not duration > 0:
        raise ValueError("duration must be positive")
    per = [
        sum(packet_size for r in records if r.delivered_at.get(rid) is not None) / duration
        for rid in receivers
    ]
    return sum(per) / len(per)


def simulate(sc: Scenario) -> SimulationResult:
    sc.check()
    tree, nodes = build_tree(sc)
    pos = {d.id: d.position for d in nodes}
    tx = tree.transmitters
    tx_index = {t: j for j, t in enumerate(tx)}
    tx_parent = np.array([-1] + [tx_index[tree.parent[t]] for t in tx[1:]], dtype=np.int64)
    centers = np.array([pos[t] for t in tx], dtype=np.float64)

    dt = sc.timestep
    interval = sc.packet_size / sc.traffic_rate
    rng = np.random.default_rng(sc.seed)
    phase = rng.uniform(0.0, interval)
    n_pkt = max(0, int(math.ceil((sc.duration - phase) / interval)))
    sent = phase + interval * np.arange(n_pkt, dtype=np.float64)
    sent = sent[sent < sc.duration]
    n_steps = int(math.ceil((sc.duration + DRAIN_S) / dt - 1e-9))

    out = kernels.fifo_tree_transmit(
        sent, tx_parent, sc.packet_size / sc.channel_rate, sc.per_hop_latency, dt, sc.queue_capacity, n_steps
    )

    receivers = tuple(sorted(d.id for d in nodes if not d.is_source))
    mobiles = {m.drone: m for m in sc.mobiles}
    delivered = np.empty((len(receivers), sent.size))
    hops = {}
    trajectories = {}
    times = np.arange(n_steps, dtype=np.float64) * dt
    reach = sc.radius + RECEIVE_TOL
    for row, rid in enumerate(receivers):
        if rid not in mobiles:
            delivered[row] = out[tx_index[tree.parent[rid]]]
            hops[rid] = tree.level[rid]
            continue
        m = mobiles[rid]
        if sc.policy is Policy.ETTA:
            traj = plan_mobile(sc, m, tree, nodes)
            trajectories[rid] = traj
            where = positions_along(traj.waypoints, m.speed, m.start_time, times)
            dist = kernels.distance_matrix(where, centers)
            ann = np.zeros((len(traj.legs), len(tx)), dtype=bool)
            for i, leg in enumerate(traj.legs):
                ann[i, [tx_index[t] for t in leg]] = True
            legs = _leg_index(traj.waypoints, m.speed, m.start_time, times)
            serving = ann[legs] & (dist <= reach)
        else:
            way = (m.origin, m.destination)
            trajectories[rid] = Trajectory(way, (tuple(tx),), "straight")
            where = positions_along(way, m.speed, m.start_time, times)
            dist = kernels.distance_matrix(where, centers)
            attach = kernels.sticky_attachment(dist, reach, tx_index[tree.parent[rid]])
            serving = attach[:, None] == np.arange(len(tx))[None, :]
        delivered[row] = kernels.first_served_delivery(out, np.ascontiguousarray(serving), dt)
        hops[rid] = 1
    res = SimulationResult(sc, tree, receivers, sent, delivered, hops, trajectories)
    res.metrics = _metrics(res)
    return res


def _metrics(res: SimulationResult) -> Metrics:
    sc = res.scenario
    ad, at, n_ok = _receiver_stats(res.sent, res.delivered, sc.packet_size, sc.duration)
    no_data = tuple(rid for rid, n in zip(res.receivers, n_ok) if n == 0)
    for rid in no_data:
        log.warning("receiver %s has no delivered packets; excluded from AMD", rid)
    amd_v = _mean_delay(ad) if res.receivers else math.nan
    amt_v = float(at.mean()) if res.receivers else math.nan

    def ratio(rows):
        sub = res.delivered[rows]
        ok = np.isfinite(sub).sum()
        lost = np.isnan(sub).sum()
        return float(ok / (ok + lost)) if ok + lost else math.nan

    mrows = [i for i, rid in enumerate(res.receivers) if rid in sc.mobile_ids]
    if mrows:
        m_ratio = ratio(mrows)
        m_extra = float(np.mean([res.trajectories[res.receivers[i]].extra_distance for i in mrows]))
        m_ad = ad[mrows]
        m_amd = float(np.nanmean(m_ad)) if np.isfinite(m_ad).any() else math.nan
        m_amt = float(at[mrows].mean())
    else:
        m_ratio = m_extra = m_amd = m_amt = math.nan
    return Metrics(
        per_receiver_avg_delay=dict(zip(res.receivers, map(float, ad))),
        per_receiver_throughput=dict(zip(res.receivers, map(float, at))),
        amd=amd_v,
        amt=amt_v,
        mobile_delivery_ratio=m_ratio,
        mobile_extra_distance=m_extra,
        delivery_ratio=ratio(list(range(len(res.receivers)))),
        mobile_amd=m_amd,
        mobile_amt=m_amt,
        no_data=no_data,
        emitted=int(res.sent.size),
    )


def run(sc: Scenario) -> Metrics:
    return simulate(sc).metrics


def sweep_rates(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic sweep ``lo, lo+step, ... <= hi``."""
    if not (step > 0 and lo <= hi):
        raise ValueError("need lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(n + 1)]
