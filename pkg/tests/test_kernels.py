"""Both kernel backends against each other and against plain-Python oracles."""

import math
from collections import deque

import numpy as np
import pytest

from aerocast.kernels import _numpy


def fifo_oracle(emit, parent, tx, hop, capacity, horizon):
    """Event-by-event FIFO with drop-tail, one transmitter at a time."""
    n_tx, n_pkt = len(parent), len(emit)
    out = [[math.inf] * n_pkt for _ in range(n_tx)]
    for j in range(n_tx):
        arrivals = emit if parent[j] < 0 else out[parent[j]]
        clock = -math.inf
        waiting_starts = deque()
        for p, a in enumerate(arrivals):
            if a != a:
                out[j][p] = math.nan
                continue
            if a == math.inf:
                continue
            while waiting_starts and waiting_starts[0] <= a:
                waiting_starts.popleft()
            if len(waiting_starts) >= capacity:
                out[j][p] = math.nan
                continue
            start = max(clock, a)
            waiting_starts.append(start)
            clock = start + tx
            out[j][p] = clock + hop if start < horizon else math.inf
    return np.array(out)


def test_segment_sphere_roots_match(backend, rng):
    for _ in range(50):
        a, b = rng.uniform(-5, 5, 3), rng.uniform(-5, 5, 3)
        centers = rng.uniform(-5, 5, (7, 3))
        radii = rng.uniform(0.5, 4, 7)
        got = backend.segment_sphere_roots(a, b, centers, radii)
        ref = _numpy.segment_sphere_roots(a, b, centers, radii)
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)
        for (t1, t2), c, r in zip(got, centers, radii):
            for t in (t1, t2):
                if t == t:
                    assert abs(np.linalg.norm(a + t * (b - a) - c) - r) < 1e-9


def test_distances(backend, rng):
    pts = rng.uniform(-100, 100, (12, 3))
    d = backend.pairwise_distances(pts)
    np.testing.assert_allclose(d, d.T)
    np.testing.assert_allclose(d[3, 7], np.linalg.norm(pts[3] - pts[7]))
    m = backend.distance_matrix(pts[:5], pts[5:])
    np.testing.assert_allclose(m, d[:5, 5:], rtol=1e-12)


@pytest.mark.parametrize("capacity", [1, 3, 64])
def test_fifo_matches_oracle(backend, rng, capacity):
    # tree: 0 -> 1 -> 3, 0 -> 2
    parent = np.array([-1, 0, 0, 1], dtype=np.int64)
    emit = np.sort(rng.uniform(0, 2.0, 400))
    tx, hop, dt = 0.004, 0.002, 0.001
    n_steps = 2600
    got = backend.fifo_tree_transmit(emit, parent, tx, hop, dt, capacity, n_steps)
    ref = fifo_oracle(list(emit), list(parent), tx, hop, capacity, n_steps * dt)
    np.testing.assert_array_equal(np.isnan(got), np.isnan(ref))
    np.testing.assert_array_equal(np.isposinf(got), np.isposinf(ref))
    fin = np.isfinite(ref)
    np.testing.assert_allclose(got[fin], ref[fin], rtol=0, atol=1e-9)
    if capacity == 1:
        assert np.isnan(got).any()


def test_fifo_uncongested_single_hop(backend):
    emit = np.arange(10) * 0.01 + 0.0005
    out = backend.fifo_tree_transmit(emit, np.array([-1], dtype=np.int64), 1e-4, 2e-3, 1e-3, 64, 200)
    np.testing.assert_allclose(out[0] - emit, 2.1e-3, atol=1e-12)


def test_sticky_attachment(backend):
    # transmitter 0 covers steps 0-3, nobody 4-5, 1 and 2 cover 6-9 (2 nearer)
    dist = np.full((10, 3), 10.0)
    dist[:4, 0] = 1.0
    dist[6:, 1] = 4.0
    dist[6:, 2] = 3.0
    dist[8:, 0] = 0.5  # 0 returns but the mobile stays with 2
    got = backend.sticky_attachment(dist, 5.0, 0)
    assert list(got) == [0, 0, 0, 0, -1, -1, 2, 2, 2, 2]


def sticky_oracle(dist, reach, cur):
    out = []
    for row in dist:
        if cur < 0 or row[cur] > reach:
            cover = [j for j in range(len(row)) if row[j] <= reach]
            cur = min(cover, key=lambda j: (row[j], j)) if cover else -1
        out.append(cur)
    return out


@pytest.mark.parametrize("noise", [0.3, 5.0])
def test_sticky_attachment_matches_step_oracle(backend, rng, noise):
    dist = np.cumsum(rng.normal(0, noise, (500, 4)), axis=0) + 5
    assert list(backend.sticky_attachment(dist, 5.0, 1)) == sticky_oracle(dist, 5.0, 1)


def test_first_served_delivery(backend):
    out = np.array([[0.0105, np.nan, np.inf, 0.05], [0.0125, 0.02, 0.03, np.nan]])
    serving = np.zeros((100, 2), dtype=bool)
    serving[10, 0] = False
    serving[12, 1] = True
    serving[20, 1] = False
    serving[30, 1] = False
    got = backend.first_served_delivery(out, serving, 1e-3)
    assert got[0] == 0.0125
    assert np.isnan(got[1])
    assert np.isposinf(got[2])
    assert np.isnan(got[3])
