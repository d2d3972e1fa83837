"""Compiled CART kernels shared by the classification forest and the regressors.

Trees are stored as flat preorder arrays::

    feature[i]    split feature, -1 for a leaf
    threshold[i]  go left iff x[feature] <= threshold
    left[i], right[i]
    value[i, :]   leaf payload: (count of class 0, count of class 1) for
                  Gini trees, (mean target, 0) for squared-error trees
    weight[i]     number of (bootstrap) samples that reached the node

Randomness comes from SplitMix64 so that a tree is a pure function of its
inputs and its 64-bit seed, independent of platform and thread scheduling.
"""

from __future__ import annotations

import numba as nb
import numpy as np

GINI = 0
SQUARED_ERROR = 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 finalisation step on a Python int (reference version)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def tree_seed(forest_seed: int, tree_index: int) -> int:
    """Seed of tree ``tree_index``; depends only on the index, never on order."""
    return splitmix64((splitmix64(forest_seed & _MASK64) + tree_index) & _MASK64)


@nb.njit(cache=True, nogil=True)
def _next_u64(state):
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True, nogil=True)
def _randbelow(state, m):
    # 53 random bits scaled to [0, m)
    u = np.float64(_next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)
    k = np.int64(u * m)
    if k >= m:
        k = m - 1
    return k


@nb.njit(cache=True, nogil=True)
def bootstrap_counts(n, seed):
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)
    counts = np.zeros(n, dtype=np.int64)
    for _ in range(n):
        counts[_randbelow(state, n)] += 1
    return counts


@nb.njit(cache=True, nogil=True)
def _node_stats(y, w, idx, start, end, criterion):
    # returns (total weight, s0, s1): class counts for Gini, (sum y, sum y^2) for SSE
    tw = 0.0
    s0 = 0.0
    s1 = 0.0
    for p in range(start, end):
        i = idx[p]
        wi = w[i]
        tw += wi
        if criterion == GINI:
            if y[i] > 0.5:
                s1 += wi
            else:
                s0 += wi
        else:
            s0 += wi * y[i]
            s1 += wi * y[i] * y[i]
    return tw, s0, s1


@nb.njit(cache=True, nogil=True)
def _node_cost(tw, s0, s1, criterion):
    # weighted impurity of a node: tw * gini, or its sum of squared errors
    if tw <= 0.0:
        return 0.0
    if criterion == GINI:
        return tw - (s0 * s0 + s1 * s1) / tw
    sse = s1 - s0 * s0 / tw
    return sse if sse > 0.0 else 0.0


@nb.njit(cache=True, nogil=True)
def build_tree(x, y, w, criterion, max_depth, min_leaf, max_features, seed):
    """Grow one CART tree on the rows with ``w > 0``.

    ``max_depth < 0`` means unlimited; ``max_features >= d`` disables feature
    subsampling. Returns the flat node arrays described in the module docstring.
    """
    n, d = x.shape
    m = 0
    for i in range(n):
        if w[i] > 0:
            m += 1
    idx = np.empty(m, dtype=np.int64)
    k = 0
    for i in range(n):
        if w[i] > 0:
            idx[k] = i
            k += 1

    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros((cap, 2), dtype=np.float64)
    weight = np.zeros(cap, dtype=np.float64)

    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)
    perm = np.arange(d)
    vals = np.empty(m, dtype=np.float64)
    order = np.empty(m, dtype=np.int64)

    # stack entries: start, end, depth, parent, is_left
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_parent = np.empty(cap, dtype=np.int64)
    st_isleft = np.empty(cap, dtype=np.int64)
    top = 0
    st_start[0] = 0
    st_end[0] = m
    st_depth[0] = 0
    st_parent[0] = -1
    st_isleft[0] = 0
    top = 1
    n_nodes = 0

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        parent = st_parent[top]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if st_isleft[top] == 1:
                left[parent] = node
            else:
                right[parent] = node

        tw, s0, s1 = _node_stats(y, w, idx, start, end, criterion)
        weight[node] = tw
        if criterion == GINI:
            value[node, 0] = s0
            value[node, 1] = s1
        else:
            value[node, 0] = s0 / tw
        parent_cost = _node_cost(tw, s0, s1, criterion)

        splittable = parent_cost > 1e-12 * (tw if criterion == GINI else (s1 + 1.0))
        if max_depth >= 0 and depth >= max_depth:
            splittable = False
        if tw < 2 * min_leaf:
            splittable = False
        if not splittable:
            continue

        best_cost = parent_cost
        best_f = -1
        best_thr = 0.0
        # random feature order; constant features do not count toward max_features
        for j in range(d):
            perm[j] = j
        visited = 0
        examined = 0
        cnt = end - start
        while visited < d and examined < max_features:
            r = visited + _randbelow(state, d - visited)
            f = perm[r]
            perm[r] = perm[visited]
            perm[visited] = f
            visited += 1

            for p in range(cnt):
                vals[p] = x[idx[start + p], f]
            srt = np.argsort(vals[:cnt], kind="mergesort")
            for p in range(cnt):
                order[p] = idx[start + srt[p]]
            if x[order[0], f] == x[order[cnt - 1], f]:
                continue
            examined += 1

            lw = 0.0
            l0 = 0.0
            l1 = 0.0
            for p in range(cnt - 1):
                i = order[p]
                wi = w[i]
                lw += wi
                if criterion == GINI:
                    if y[i] > 0.5:
                        l1 += wi
                    else:
                        l0 += wi
                else:
                    l0 += wi * y[i]
                    l1 += wi * y[i] * y[i]
                a = x[i, f]
                b = x[order[p + 1], f]
                if a == b:
                    continue
                rw = tw - lw
                if lw < min_leaf or rw < min_leaf:
                    continue
                cost = _node_cost(lw, l0, l1, criterion) + _node_cost(rw, s0 - l0, s1 - l1, criterion)
                thr = 0.5 * (a + b)
                if thr >= b:
                    thr = a
                if cost < best_cost - 1e-12 * (1.0 + abs(best_cost)) or (
                    best_f >= 0 and abs(cost - best_cost) <= 1e-12 * (1.0 + abs(best_cost))
                    and (f < best_f or (f == best_f and thr < best_thr))
                ):
                    best_cost = cost
                    best_f = f
                    best_thr = thr

        if best_f < 0:
            continue

        # partition idx[start:end] so that rows with x <= thr come first
        lo = start
        hi = end - 1
        while lo <= hi:
            if x[idx[lo], best_f] <= best_thr:
                lo += 1
            else:
                tmp = idx[lo]
                idx[lo] = idx[hi]
                idx[hi] = tmp
                hi -= 1
        feature[node] = best_f
        threshold[node] = best_thr
        # push right first so the left child receives the next preorder id
        st_start[top] = lo
        st_end[top] = end
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_isleft[top] = 0
        top += 1
        st_start[top] = start
        st_end[top] = lo
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_isleft[top] = 1
        top += 1

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
        weight[:n_nodes].copy(),
    )


@nb.njit(cache=True, nogil=True)
def apply_tree(feature, threshold, left, right, x):
    """Index of the leaf reached by every row of ``x``."""
    n = x.shape[0]
    out = np.empty(n, dtype=np.int64)
    for r in range(n):
        node = 0
        while feature[node] >= 0:
            if x[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = node
    return out
