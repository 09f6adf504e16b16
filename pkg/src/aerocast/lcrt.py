"""LCRT multicast tree: BFS hop levels, then greedy forwarder selection."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import InvalidScenario, Uncoverable, Unreachable
from .geometry import Point3, as_point, euclidean_distance


@dataclass(frozen=True)
class DroneNode:
    id: int
    position: Point3
    is_source: bool = False

    def __post_init__(self):
        if int(self.id) != self.id or self.id < 0:
            raise ValueError(f"drone id must be a non-negative integer, got {self.id!r}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "position", as_point(self.position))


@dataclass(frozen=True)
class MulticastTree:
    source: int
    level: Mapping[int, int]
    parent: Mapping[int, int]
    forwarders: frozenset = field(default_factory=frozenset)

    @property
    def transmitters(self) -> list[int]:
        """Source first, then forwarders by (level, id)."""
        fwd = sorted(self.forwarders, key=lambda i: (self.level[i], i))
        return [self.source] + fwd

    def children(self, node: int) -> list[int]:
        return sorted(n for n, p in self.parent.items() if p == node)

    def hops(self, node: int) -> int:
        return self.level[node]


def _single_source(drones: Sequence[DroneNode]) -> DroneNode:
    sources = [d for d in drones if d.is_source]
    if len(sources) != 1:
        raise InvalidScenario(f"expected exactly one source, found {len(sources)}")
    ids = [d.id for d in drones]
    if len(set(ids)) != len(ids):
        raise InvalidScenario("duplicate drone ids")
    return sources[0]


def _distances(drones: Sequence[DroneNode]) -> np.ndarray:
    pts = np.array([d.position for d in drones], dtype=np.float64).reshape(-1, 3)
    return kernels.pairwise_distances(pts)


def compute_levels(drones: Sequence[DroneNode], r: float, non_relaying: Iterable[int] = ()) -> dict[int, int]:
    """Hop count from the source over the unit-disk graph (edges at distance <= r).

    Drones in ``non_relaying`` get a level but are never expanded, so no other
    drone reaches the source through them.
    """
    src = _single_source(drones)
    blocked = set(non_relaying)
    dist = _distances(drones)
    index = {d.id: i for i, d in enumerate(drones)}
    level = {src.id: 0}
    queue = deque([src.id])
    while queue:
        u = queue.popleft()
        if u in blocked and u != src.id:
            continue
        row = dist[index[u]]
        for d in drones:
            if d.id not in level and row[index[d.id]] <= r:
                level[d.id] = level[u] + 1
                queue.append(d.id)
    missing = [d.id for d in drones if d.id not in level]
    if missing:
        raise Unreachable(missing)
    return level


def build_lcrt_tree(drones: Sequence[DroneNode], r: float, non_relaying: Iterable[int] = ()) -> MulticastTree:
    """Level-by-level greedy forwarder selection.

    Working from the second-highest level down to level 1, the drone covering
    the most still-unparented drones one level up is picked (lowest id on
    ties) until every such drone has a forwarder. Each child is then parented
    by its nearest selected forwarder.
    """
    blocked = set(non_relaying)
    level = compute_levels(drones, r, blocked)
    src = _single_source(drones).id
    pos = {d.id: d.position for d in drones}
    by_level: dict[int, list[int]] = {}
    for i, lv in level.items():
        by_level.setdefault(lv, []).append(i)
    for ids in by_level.values():
        ids.sort()
    top = max(by_level)

    parent = {i: src for i in by_level.get(1, [])}
    forwarders: set[int] = set()
    for lv in range(top - 1, 0, -1):
        targets = by_level[lv + 1]
        candidates = [c for c in by_level[lv] if c not in blocked]
        reach = {
            c: {t for t in targets if euclidean_distance(pos[c], pos[t]) <= r}
            for c in candidates
        }
        uncovered = set(targets)
        selected = []
        while uncovered:
            best = max(candidates, key=lambda c: (len(reach[c] & uncovered), -c), default=None)
            if best is None or not reach[best] & uncovered:
                raise Uncoverable(f"level-{lv + 1} drones {sorted(uncovered)} have no level-{lv} forwarder")
            selected.append(best)
            uncovered -= reach[best]
        for t in targets:
            parent[t] = min(
                (c for c in selected if t in reach[c]),
                key=lambda c: (euclidean_distance(pos[c], pos[t]), c),
            )
        forwarders.update(selected)
    return MulticastTree(source=src, level=level, parent=parent, forwarders=frozenset(forwarders))
