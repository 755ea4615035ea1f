import math

import numpy as np

from . import jit


@jit
def xorshift_below(state, m):
    """Next xorshift32 value reduced to [0, m); ``state`` is a 1-element int64 array."""
    x = state[0]
    x ^= (x << 13) & 0xFFFFFFFF
    x ^= x >> 17
    x ^= (x << 5) & 0xFFFFFFFF
    state[0] = x
    return x % m


@jit
def _entropy2(a, b):
    n = a + b
    h = 0.0
    if a > 0:
        h -= a / n * math.log2(a / n)
    if b > 0:
        h -= b / n * math.log2(b / n)
    return h


@jit
def _best_threshold(j, col_ptr, row_idx, col_val, in_node, y, w, t0, t1, min_leaf, min_gain,
                    buf_val, buf_y, buf_w):
    """Best binary split ``x_j <= thr`` of the current node on feature j.

    Returns (gain_ratio, threshold); gain_ratio is -1 when no admissible
    split exists. Feature values are assumed nonnegative.
    """
    m = 0
    for p in range(col_ptr[j], col_ptr[j + 1]):
        r = row_idx[p]
        if in_node[r]:
            buf_val[m] = col_val[p]
            buf_y[m] = y[r]
            buf_w[m] = w[r]
            m += 1
    if m == 0:
        return -1.0, 0.0
    n = t0 + t1
    # left side starts with the implicit zeros
    l0 = t0
    l1 = t1
    for q in range(m):
        if buf_y[q] == 0:
            l0 -= buf_w[q]
        else:
            l1 -= buf_w[q]
    order = np.argsort(buf_val[:m], kind="mergesort")
    h_parent = _entropy2(t0, t1)
    best_gr = -1.0
    best_thr = 0.0
    prev = 0.0
    q = 0
    while q < m:
        v = buf_val[order[q]]
        if v > prev:
            # candidate: everything <= prev goes left
            nl = l0 + l1
            nr = n - nl
            if nl >= min_leaf and nr >= min_leaf and nl > 0 and nr > 0:
                gain = h_parent - (nl / n) * _entropy2(l0, l1) - (nr / n) * _entropy2(t0 - l0, t1 - l1)
                if gain > min_gain:
                    split_info = _entropy2(nl, nr)
                    if split_info > 0:
                        gr = gain / split_info
                        if gr > best_gr:
                            best_gr = gr
                            best_thr = (prev + v) / 2.0
        while q < m and buf_val[order[q]] == v:
            k = order[q]
            if buf_y[k] == 0:
                l0 += buf_w[k]
            else:
                l1 += buf_w[k]
            q += 1
        prev = v
    return best_gr, best_thr


@jit
def grow_tree(col_ptr, row_idx, col_val, n_features, y, w, rows, min_leaf, max_depth,
              k_features, rng_state, min_gain):
    """Grow a decision tree on weighted instances.

    ``col_ptr/row_idx/col_val`` is the CSC form of the design matrix, ``rows``
    the instances with positive weight (duplicates not allowed). When
    ``k_features`` is positive each node examines features in random order
    and stops after ``k_features`` once a useful split has been seen.

    Returns node arrays ``(feature, threshold, left, right, dist, n_nodes)``;
    leaves have ``feature == -1``; ``dist`` holds per-class weight.
    """
    n_rows = rows.shape[0]
    n_samples = y.shape[0]
    cap = 2 * n_rows + 1
    feature = -np.ones(cap, dtype=np.int64)
    threshold = np.zeros(cap)
    left = -np.ones(cap, dtype=np.int64)
    right = -np.ones(cap, dtype=np.int64)
    dist = np.zeros((cap, 2))

    in_node = np.zeros(n_samples, dtype=np.bool_)
    xval = np.zeros(n_samples)
    buf_val = np.empty(n_rows)
    buf_y = np.empty(n_rows, dtype=np.int64)
    buf_w = np.empty(n_rows)
    perm = np.arange(n_features)
    part = rows.copy()

    # explicit stack: node id, start, end, depth
    stack = np.empty((cap, 4), dtype=np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_rows
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        t0 = 0.0
        t1 = 0.0
        for s in range(start, end):
            r = part[s]
            if y[r] == 0:
                t0 += w[r]
            else:
                t1 += w[r]
        dist[node, 0] = t0
        dist[node, 1] = t1
        if t0 == 0.0 or t1 == 0.0 or t0 + t1 < 2.0 * min_leaf:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        for s in range(start, end):
            in_node[part[s]] = True

        best_gr = -1.0
        best_j = -1
        best_thr = 0.0
        if k_features <= 0 or k_features >= n_features:
            for j in range(n_features):
                gr, thr = _best_threshold(j, col_ptr, row_idx, col_val, in_node, y, w, t0, t1,
                                          min_leaf, min_gain, buf_val, buf_y, buf_w)
                if gr > best_gr:
                    best_gr = gr
                    best_j = j
                    best_thr = thr
        else:
            examined = 0
            remaining = n_features
            while remaining > 0 and (examined < k_features or best_j < 0):
                pick = xorshift_below(rng_state, remaining)
                j = perm[pick]
                remaining -= 1
                perm[pick] = perm[remaining]
                perm[remaining] = j
                examined += 1
                gr, thr = _best_threshold(j, col_ptr, row_idx, col_val, in_node, y, w, t0, t1,
                                          min_leaf, min_gain, buf_val, buf_y, buf_w)
                if gr > best_gr or (gr == best_gr and gr >= 0 and j < best_j):
                    best_gr = gr
                    best_j = j
                    best_thr = thr

        for s in range(start, end):
            in_node[part[s]] = False
        if best_j < 0:
            continue

        for p in range(col_ptr[best_j], col_ptr[best_j + 1]):
            xval[row_idx[p]] = col_val[p]
        # stable partition: left block keeps x <= thr
        lo = start
        tmp = part[start:end].copy()
        for s in range(end - start):
            r = tmp[s]
            if xval[r] <= best_thr:
                part[lo] = r
                lo += 1
        hi = lo
        for s in range(end - start):
            r = tmp[s]
            if xval[r] > best_thr:
                part[hi] = r
                hi += 1
        for p in range(col_ptr[best_j], col_ptr[best_j + 1]):
            xval[row_idx[p]] = 0.0

        feature[node] = best_j
        threshold[node] = best_thr
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        # push right first so the left subtree is grown first
        stack[top, 0] = rnode
        stack[top, 1] = lo
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = lnode
        stack[top, 1] = start
        stack[top, 2] = lo
        stack[top, 3] = depth + 1
        top += 1
    return feature, threshold, left, right, dist, n_nodes


@jit
def tree_predict(indptr, indices, data, feature, threshold, left, right, dist, out):
    """Add each row's normalized leaf distribution into ``out`` (n, 2)."""
    n = indptr.shape[0] - 1
    for i in range(n):
        lo = indptr[i]
        hi = indptr[i + 1]
        node = 0
        while feature[node] >= 0:
            j = feature[node]
            pos = lo + np.searchsorted(indices[lo:hi], j)
            v = 0.0
            if pos < hi and indices[pos] == j:
                v = data[pos]
            if v <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        tot = dist[node, 0] + dist[node, 1]
        out[i, 0] += dist[node, 0] / tot
        out[i, 1] += dist[node, 1] / tot
