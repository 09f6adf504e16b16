"""Compiled loop kernels (numba).

The simulator kernel is genuinely time-stepped: every step each transmitter
may start packets until its service clock passes the step end, which is a
per-step budget of ``channel_rate * dt`` bits with carry-over.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def segment_sphere_roots(a, b, centers, radii):
    n = centers.shape[0]
    out = np.full((n, 2), np.nan)
    d0 = b[0] - a[0]
    d1 = b[1] - a[1]
    d2 = b[2] - a[2]
    qa = d0 * d0 + d1 * d1 + d2 * d2
    for i in range(n):
        f0 = a[0] - centers[i, 0]
        f1 = a[1] - centers[i, 1]
        f2 = a[2] - centers[i, 2]
        qb = 2.0 * (f0 * d0 + f1 * d1 + f2 * d2)
        qc = f0 * f0 + f1 * f1 + f2 * f2 - radii[i] * radii[i]
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            continue
        sq = math.sqrt(disc)
        q = -0.5 * (qb + math.copysign(sq, qb))
        if q == 0.0:
            t1 = 0.0
            t2 = 0.0
        else:
            t1 = q / qa
            t2 = qc / q
        if t1 <= t2:
            out[i, 0] = t1
            out[i, 1] = t2
        else:
            out[i, 0] = t2
            out[i, 1] = t1
    return out


@njit(cache=True)
def pairwise_distances(points):
    n = points.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(3):
                diff = points[i, k] - points[j, k]
                s += diff * diff
            out[i, j] = math.sqrt(s)
            out[j, i] = out[i, j]
    return out


@njit(cache=True)
def distance_matrix(points, centers):
    n = points.shape[0]
    m = centers.shape[0]
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(3):
                diff = points[i, k] - centers[j, k]
                s += diff * diff
            out[i, j] = math.sqrt(s)
    return out


@njit(cache=True)
def sticky_attachment(dist, reach, initial):
    n_steps, n_tx = dist.shape
    attach = np.full(n_steps, -1, dtype=np.int64)
    cur = initial
    for k in range(n_steps):
        if cur >= 0 and dist[k, cur] <= reach:
            attach[k] = cur
            continue
        cur = -1
        best = np.inf
        for j in range(n_tx):
            if dist[k, j] <= reach and dist[k, j] < best:
                best = dist[k, j]
                cur = j
        attach[k] = cur
    return attach


@njit(cache=True)
def fifo_tree_transmit(emit_times, tx_parent, tx_time, per_hop, dt, capacity, n_steps):
    n_tx = tx_parent.shape[0]
    n_pkt = emit_times.shape[0]
    out = np.full((n_tx, n_pkt), np.inf)
    ready = np.full((n_tx, n_pkt), np.inf)
    head = np.zeros(n_tx, dtype=np.int64)
    clock = np.full(n_tx, -np.inf)
    # last `capacity` accepted start times per transmitter (ring buffer)
    ring = np.full((n_tx, capacity), -np.inf)
    ring_pos = np.zeros(n_tx, dtype=np.int64)
    emitted = 0
    for k in range(n_steps):
        t1 = (k + 1) * dt
        while emitted < n_pkt and emit_times[emitted] < t1:
            ready[0, emitted] = emit_times[emitted]
            emitted += 1
        idle = emitted == n_pkt
        for j in range(n_tx):
            while head[j] < n_pkt:
                p = head[j]
                rt = ready[j, p]
                if rt == np.inf:
                    break
                drop = rt != rt
                if not drop:
                    # drop-tail: `capacity` accepted packets still waiting at arrival
                    drop = ring[j, ring_pos[j]] > rt
                if drop:
                    out[j, p] = np.nan
                    for c in range(j + 1, n_tx):
                        if tx_parent[c] == j:
                            ready[c, p] = np.nan
                    head[j] += 1
                    continue
                start = max(clock[j], rt)
                if start >= t1:
                    break
                ring[j, ring_pos[j]] = start
                ring_pos[j] = (ring_pos[j] + 1) % capacity
                clock[j] = start + tx_time
                arr = clock[j] + per_hop
                out[j, p] = arr
                for c in range(j + 1, n_tx):
                    if tx_parent[c] == j:
                        ready[c, p] = arr
                head[j] += 1
            if head[j] < n_pkt:
                idle = False
        if idle:
            break
    return out


@njit(cache=True)
def first_served_delivery(out, serving, dt):
    n_tx, n_pkt = out.shape
    n_steps = serving.shape[0]
    res = np.empty(n_pkt)
    for p in range(n_pkt):
        best = np.inf
        pending = False
        for j in range(n_tx):
            t = out[j, p]
            if t == np.inf:
                pending = True
                continue
            if t != t:
                continue
            k = int(math.floor(t / dt))
            if k < 0:
                k = 0
            elif k >= n_steps:
                k = n_steps - 1
            if serving[k, j] and t < best:
                best = t
        if best < np.inf:
            res[p] = best
        elif pending:
            res[p] = np.inf
        else:
            res[p] = np.nan
    return res
