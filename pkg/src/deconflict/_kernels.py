"""Hot numeric kernels: SCC labeling, feedback-arc-set DP, greedy ordering, rating sweeps.

Every kernel is written against numpy arrays in nopython-compatible style and
compiled with numba when available. Setting DECONFLICT_DISABLE_NUMBA=1 (or
running without numba installed) selects the plain-Python fallback path; the
two paths share one body, so they cannot drift. ``benchmarks/bench_kernels.py``
compares them.
"""

from __future__ import annotations

import os

import numpy as np


def _env_disabled() -> bool:
    return os.environ.get("DECONFLICT_DISABLE_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
    )


NUMBA_ENABLED = False
if not _env_disabled():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def _maybe_jit(fn):
    if NUMBA_ENABLED:
        return njit(cache=True)(fn)
    return fn


def python_impl(fn):
    """Return the uncompiled body of a kernel (itself when numba is off)."""
    return getattr(fn, "py_func", fn)


INF_COST = np.int64(1) << 40


@_maybe_jit
def tarjan_scc_labels(adj):
    """Label each vertex with its strongly connected component id.

    adj is a dense 0/1 adjacency matrix. Labels are assigned in component
    completion order (reverse topological over the condensation); callers
    that need a canonical presentation sort afterwards.
    """
    n = adj.shape[0]
    index = np.full(n, -1, np.int64)
    low = np.zeros(n, np.int64)
    on_stack = np.zeros(n, np.uint8)
    stack = np.empty(n, np.int64)
    sp = 0
    labels = np.full(n, -1, np.int64)
    n_components = 0
    counter = 0
    # Explicit DFS frames: vertex and next-neighbor cursor per depth.
    frame_v = np.empty(n, np.int64)
    frame_w = np.empty(n, np.int64)

    for root in range(n):
        if index[root] != -1:
            continue
        depth = 0
        frame_v[0] = root
        frame_w[0] = 0
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = 1
        while depth >= 0:
            v = frame_v[depth]
            w = frame_w[depth]
            descended = False
            while w < n:
                if adj[v, w] != 0:
                    if index[w] == -1:
                        frame_w[depth] = w + 1
                        depth += 1
                        frame_v[depth] = w
                        frame_w[depth] = 0
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        on_stack[w] = 1
                        descended = True
                        break
                    elif on_stack[w] == 1 and index[w] < low[v]:
                        low[v] = index[w]
                w += 1
            if descended:
                continue
            if low[v] == index[v]:
                while True:
                    u = stack[sp - 1]
                    sp -= 1
                    on_stack[u] = 0
                    labels[u] = n_components
                    if u == v:
                        break
                n_components += 1
            depth -= 1
            if depth >= 0:
                parent = frame_v[depth]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return labels


@_maybe_jit
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@_maybe_jit
def min_fas_order(adj):
    """Optimal linear arrangement minimizing backward edges, via subset DP.

    Returns (order, cost): order[p] is the vertex at position p, cost the
    number of edges pointing from a later position to an earlier one. Ties
    at every DP step go to the lowest vertex index, which pins down one
    reproducible optimal ordering. Memory is O(2^n); callers cap n.
    """
    n = adj.shape[0]
    out_mask = np.zeros(n, np.int64)
    for v in range(n):
        m = np.int64(0)
        for u in range(n):
            if adj[v, u] != 0:
                m |= np.int64(1) << u
        out_mask[v] = m

    size = np.int64(1) << n
    dp = np.full(size, INF_COST, np.int64)
    last = np.full(size, -1, np.int64)
    dp[0] = 0
    for mask in range(1, size):
        best = INF_COST
        best_v = -1
        for v in range(n):
            bit = np.int64(1) << v
            if mask & bit:
                prev = mask ^ bit
                # v sits after every vertex of prev: its out-edges into prev
                # become backward.
                cost = dp[prev] + _popcount(out_mask[v] & prev)
                if cost < best:
                    best = cost
                    best_v = v
        dp[mask] = best
        last[mask] = best_v

    order = np.empty(n, np.int64)
    mask = size - 1
    for pos in range(n - 1, -1, -1):
        v = last[mask]
        order[pos] = v
        mask ^= np.int64(1) << v
    return order, dp[size - 1]


@_maybe_jit
def min_fas_cost_keeping_edge(adj, keep_u, keep_v):
    """Minimum backward-edge count over orderings that keep (keep_u, keep_v) forward.

    Used to probe whether an alternative minimum feedback arc set avoids a
    given removed edge.
    """
    n = adj.shape[0]
    out_mask = np.zeros(n, np.int64)
    for v in range(n):
        m = np.int64(0)
        for u in range(n):
            if adj[v, u] != 0:
                m |= np.int64(1) << u
        out_mask[v] = m

    keep_bit = np.int64(1) << keep_v
    size = np.int64(1) << n
    dp = np.full(size, INF_COST, np.int64)
    dp[0] = 0
    for mask in range(1, size):
        best = INF_COST
        for v in range(n):
            bit = np.int64(1) << v
            if mask & bit:
                prev = mask ^ bit
                if v == keep_u and (prev & keep_bit) != 0:
                    continue  # would place keep_u after keep_v
                if dp[prev] >= INF_COST:
                    continue
                cost = dp[prev] + _popcount(out_mask[v] & prev)
                if cost < best:
                    best = cost
        dp[mask] = best
    return dp[size - 1]


@_maybe_jit
def eades_order(adj):
    """Greedy sink/source peel ordering for the feedback-arc-set heuristic.

    Sinks (including isolated vertices) are peeled to the suffix, sources to
    the prefix; when neither exists the vertex maximizing out-degree minus
    in-degree moves to the prefix. Equal candidates resolve to the lowest
    index. Backward edges of the returned order form the heuristic arc set.
    """
    n = adj.shape[0]
    alive = np.ones(n, np.uint8)
    outd = np.zeros(n, np.int64)
    ind = np.zeros(n, np.int64)
    for v in range(n):
        for u in range(n):
            if adj[v, u] != 0:
                outd[v] += 1
                ind[u] += 1

    prefix = np.empty(n, np.int64)
    suffix = np.empty(n, np.int64)
    n_pre = 0
    n_suf = 0  # suffix is collected in peel order, then reversed
    remaining = n

    while remaining > 0:
        peeled = True
        while peeled:
            peeled = False
            for v in range(n):
                if alive[v] and outd[v] == 0:
                    alive[v] = 0
                    remaining -= 1
                    suffix[n_suf] = v
                    n_suf += 1
                    for u in range(n):
                        if alive[u] and adj[u, v] != 0:
                            outd[u] -= 1
                    peeled = True
                    break
        peeled = True
        while peeled:
            peeled = False
            for v in range(n):
                if alive[v] and ind[v] == 0 and outd[v] > 0:
                    alive[v] = 0
                    remaining -= 1
                    prefix[n_pre] = v
                    n_pre += 1
                    for u in range(n):
                        if alive[u] and adj[v, u] != 0:
                            ind[u] -= 1
                    peeled = True
                    break
        if remaining > 0:
            best_v = -1
            best_delta = np.int64(-(1 << 40))
            for v in range(n):
                if alive[v]:
                    delta = outd[v] - ind[v]
                    if delta > best_delta:
                        best_delta = delta
                        best_v = v
            alive[best_v] = 0
            remaining -= 1
            prefix[n_pre] = best_v
            n_pre += 1
            for u in range(n):
                if alive[u]:
                    if adj[best_v, u] != 0:
                        ind[u] -= 1
                    if adj[u, best_v] != 0:
                        outd[u] -= 1

    order = np.empty(n, np.int64)
    for p in range(n_pre):
        order[p] = prefix[p]
    for s in range(n_suf):
        order[n_pre + s] = suffix[n_suf - 1 - s]
    return order


@_maybe_jit
def elo_sweep(matrix, k, tol, max_sweeps):
    """Iterate chess-style rating updates over all pairs until stable.

    matrix holds {-1, 0, +1} verdicts; pairs are visited in ascending (i, j)
    order each sweep. Returns (ratings, sweeps_run, converged, sum_history)
    where sum_history[s] is the total rating after sweep s (index 0 is the
    initial total), exposing the conservation diagnostic.
    """
    g = matrix.shape[0]
    ratings = np.full(g, 1500.0)
    history = np.empty(max_sweeps + 1)
    history[0] = 1500.0 * g
    sweeps = 0
    converged = False
    for it in range(max_sweeps):
        max_change = 0.0
        for i in range(g):
            for j in range(i + 1, g):
                if matrix[i, j] > 0:
                    s_ij = 1.0
                elif matrix[i, j] < 0:
                    s_ij = 0.0
                else:
                    s_ij = 0.5
                e_ij = 1.0 / (1.0 + 10.0 ** ((ratings[j] - ratings[i]) / 400.0))
                e_ji = 1.0 / (1.0 + 10.0 ** ((ratings[i] - ratings[j]) / 400.0))
                d_i = k * (s_ij - e_ij)
                d_j = k * ((1.0 - s_ij) - e_ji)
                ratings[i] += d_i
                ratings[j] += d_j
                if abs(d_i) > max_change:
                    max_change = abs(d_i)
                if abs(d_j) > max_change:
                    max_change = abs(d_j)
        sweeps = it + 1
        total = 0.0
        for i in range(g):
            total += ratings[i]
        history[sweeps] = total
        if max_change < tol:
            converged = True
            break
    return ratings, sweeps, converged, history[: sweeps + 1]
