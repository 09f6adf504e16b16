"""Vectorized numpy kernels.

Same contracts as :mod:`aerocast.kernels._numba`. Results agree with the
compiled loops up to floating-point rounding (~1e-12 relative); sequential
state machines fall back to short Python loops over events, not steps.
"""

import numpy as np


def segment_sphere_roots(a, b, centers, radii):
    """Roots of ``|a + t (b - a) - c|^2 = r^2`` for every sphere.

    Returns an ``(n, 2)`` array of ascending roots (unclipped), NaN rows where
    the line misses the sphere.
    """
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(b, dtype=np.float64) - a
    f = a - np.asarray(centers, dtype=np.float64).reshape(-1, 3)
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    qa = d @ d
    qb = 2.0 * (f @ d)
    qc = np.einsum("ij,ij->i", f, f) - radii * radii
    disc = qb * qb - 4.0 * qa * qc
    out = np.full((f.shape[0], 2), np.nan)
    ok = disc >= 0.0
    if not ok.any():
        return out
    sq = np.sqrt(disc[ok])
    b_ok = qb[ok]
    q = -0.5 * (b_ok + np.copysign(sq, b_ok))
    zero = q == 0.0
    safe_q = np.where(zero, 1.0, q)
    t1 = np.where(zero, 0.0, q / qa)
    t2 = np.where(zero, 0.0, qc[ok] / safe_q)
    out[ok, 0] = np.minimum(t1, t2)
    out[ok, 1] = np.maximum(t1, t2)
    return out


def pairwise_distances(points):
    p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    diff = p[:, None, :] - p[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def distance_matrix(points, centers):
    """``(K, T)`` distances from each point to each center."""
    p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    c = np.asarray(centers, dtype=np.float64).reshape(-1, 3)
    diff = p[:, None, :] - c[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def sticky_attachment(dist, reach, initial):
    """Per-step serving transmitter under break-before-make association.

    The current attachment is kept while ``dist <= reach``; once lost, the
    nearest covering transmitter (lowest index on ties) is taken, or -1.
    """
    n_steps, n_tx = dist.shape
    attach = np.full(n_steps, -1, dtype=np.int64)
    covered = dist <= reach
    any_cov = covered.any(axis=1)
    masked = np.where(covered, dist, np.inf)
    nearest = np.where(any_cov, np.argmin(masked, axis=1), -1)
    # event indices, so each hand-off costs one binary search
    lost_at = [np.flatnonzero(~covered[:, j]) for j in range(n_tx)]
    cov_at = np.flatnonzero(any_cov)
    k = 0
    cur = initial
    while k < n_steps:
        if cur >= 0:
            lost = lost_at[cur]
            i = np.searchsorted(lost, k)
            end = n_steps if i == lost.size else int(lost[i])
            attach[k:end] = cur
            k = end
            cur = -1
            continue
        i = np.searchsorted(cov_at, k)
        if i == cov_at.size:
            break
        k = int(cov_at[i])
        cur = nearest[k]
    return attach


def _fifo_lindley(arrivals, tx_time):
    # done_i = max_k<=i (a_k + (i - k + 1) tx), closed form of the FIFO recursion
    idx = np.arange(arrivals.size, dtype=np.float64)
    base = np.maximum.accumulate(arrivals - idx * tx_time)
    return base + (idx + 1.0) * tx_time


def _fifo_droptail(arrivals, tx_time, capacity):
    starts = np.empty(arrivals.size)
    accepted = np.zeros(arrivals.size, dtype=bool)
    recent = []
    clock = -np.inf
    for i, a in enumerate(arrivals):
        if len(recent) >= capacity and recent[-capacity] > a:
            continue
        s = max(clock, a)
        starts[i] = s
        clock = s + tx_time
        accepted[i] = True
        recent.append(s)
        if len(recent) > capacity:
            recent.pop(0)
    return starts, accepted


def fifo_tree_transmit(emit_times, tx_parent, tx_time, per_hop, dt, capacity, n_steps):
    """Per-transmitter FIFO service over a multicast tree.

    ``tx_parent[j]`` is the upstream transmitter of ``j`` (-1 for the source,
    parents precede children). Returns ``(T, P)`` times at which transmitter
    ``j``'s copy of packet ``p`` reaches its listeners: NaN if dropped on the
    way, +inf if still queued when the horizon ``n_steps * dt`` ends.
    """
    emit_times = np.asarray(emit_times, dtype=np.float64)
    n_tx = len(tx_parent)
    n_pkt = emit_times.size
    horizon = n_steps * dt
    out = np.full((n_tx, n_pkt), np.inf)
    for j in range(n_tx):
        arr = emit_times if tx_parent[j] < 0 else out[tx_parent[j]]
        live = np.isfinite(arr)
        out[j, np.isnan(arr)] = np.nan
        a = arr[live]
        if a.size == 0:
            continue
        done = _fifo_lindley(a, tx_time)
        starts = done - tx_time
        accepted = np.ones(a.size, dtype=bool)
        if a.size > capacity:
            # waiting (accepted, not started) packets seen by each arrival
            waiting = np.arange(a.size) - np.searchsorted(starts, a, side="right")
            if (waiting >= capacity).any():
                starts, accepted = _fifo_droptail(a, tx_time, capacity)
        res = np.where(accepted, starts + tx_time + per_hop, np.nan)
        res[accepted & (starts >= horizon)] = np.inf
        out[j, live] = res
    return out


def first_served_delivery(out, serving, dt):
    """Earliest copy of each packet heard by a mobile receiver.

    ``serving[k, j]`` says whether the mobile can hear transmitter ``j`` during
    step ``k``. Returns ``(P,)`` delivery times; NaN = lost, +inf = some copy
    was still queued at the horizon and none was heard.
    """
    n_steps = serving.shape[0]
    finite = np.isfinite(out)
    k = np.zeros(out.shape, dtype=np.int64)
    k[finite] = np.clip(np.floor(out[finite] / dt).astype(np.int64), 0, n_steps - 1)
    j = np.broadcast_to(np.arange(out.shape[0])[:, None], out.shape)
    heard = finite & serving[k, j]
    best = np.where(heard, out, np.inf).min(axis=0)
    pending = np.isposinf(out).any(axis=0)
    return np.where(np.isfinite(best), best, np.where(pending, np.inf, np.nan))
