"""Weighted overlap graph over transmitters and min-weight path search."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import NoPath
from .geometry import EPS, Point3, euclidean_distance
from .lcrt import DroneNode, MulticastTree


@dataclass(frozen=True)
class OverlapGraph:
    nodes: frozenset
    # undirected: both (u, v) and (v, u) are stored
    adjacency: Mapping[int, Mapping[int, float]]
    positions: Mapping[int, Point3]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return sorted((u, v, w) for u, nbrs in self.adjacency.items() for v, w in nbrs.items() if u < v)

    def weight(self, u: int, v: int) -> float:
        return self.adjacency[u][v]

    def path_weight(self, path: Sequence[int]) -> float:
        return sum(self.adjacency[u][v] for u, v in zip(path, path[1:]))


def overlapping(p, q, r: float) -> bool:
    """Coverage spheres of radius r around p and q intersect in more than a point."""
    return euclidean_distance(p, q) < 2.0 * r - EPS


def build_overlap_graph(tree: MulticastTree, drones: Sequence[DroneNode], r: float) -> OverlapGraph:
    pos = {d.id: d.position for d in drones}
    nodes = sorted(tree.transmitters)
    adj: dict[int, dict[int, float]] = {u: {} for u in nodes}
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            d = euclidean_distance(pos[u], pos[v])
            if d < 2.0 * r - EPS:
                adj[u][v] = d
                adj[v][u] = d
    return OverlapGraph(frozenset(nodes), adj, {u: pos[u] for u in nodes})


def min_weight_path(g: OverlapGraph, src: int, dst: int) -> list[int]:
    """Dijkstra; equal tentative distances settle in ascending id order."""
    if src not in g.nodes or dst not in g.nodes:
        raise KeyError(f"{src} or {dst} not in overlap graph")
    dist = {src: 0.0}
    prev: dict[int, int] = {}
    done = set()
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            break
        for v in sorted(g.adjacency[u]):
            nd = d + g.adjacency[u][v]
            if v not in done and nd < dist.get(v, float("inf")):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if dst not in done:
        raise NoPath(src, dst)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def to_dot(g: OverlapGraph, name: str = "overlap") -> str:
    """Graphviz DOT text; edge labels are center distances rounded to 0.1 m."""
    lines = [f"graph {name} {{"]
    for u in sorted(g.nodes):
        lines.append(f'  {u} [label="{u}"];')
    for u, v, w in g.edges:
        lines.append(f'  {u} -- {v} [label="{w:.1f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
