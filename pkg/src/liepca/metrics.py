"""Distances between two simulated point sets.

Both metrics accept arrays of shape (N, d) or :class:`~liepca.density.SampleSet`.
"""

import math

import numpy as np

from .exceptions import PreconditionError
from .validation import check_cloud


def _points(P, name):
    P = getattr(P, "points", P)
    return check_cloud(P, min_samples=1, name=name)


def cost_matrix(Y, Z):
    """Euclidean distances ``D[s, t] = ||Y[s] - Z[t]||``.

    Squared differences are accumulated coordinate by coordinate, in order,
    so each entry is exactly ``sqrt(sum((y_j - z_j)**2 for j in range(d)))``.
    """
    Y, Z = _points(Y, "Y"), _points(Z, "Z")
    if Y.shape[1] != Z.shape[1]:
        raise PreconditionError(
            f"point sets live in different dimensions: {Y.shape[1]} and {Z.shape[1]}")
    acc = np.zeros((Y.shape[0], Z.shape[0]))
    for j in range(Y.shape[1]):
        diff = Y[:, j, None] - Z[None, :, j]
        acc += diff * diff
    return np.sqrt(acc)


def linear_assignment(C):
    """Minimum-cost perfect matching of a square cost matrix.

    Shortest augmenting paths with dual potentials (the Hungarian method in
    its O(N^3) form); each row is inserted by a Dijkstra-like scan over the
    columns, vectorized over columns.

    Returns
    -------
    cols : ndarray of shape (N,)
        ``cols[i]`` is the column assigned to row ``i``.
    cost : float
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise PreconditionError(f"cost matrix must be square, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise PreconditionError("cost matrix has non-finite entries")
    n = C.shape[0]
    # Index 0 is a virtual column; real columns are 1..n and rows 1..n.
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        row_of[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of[j0]
            free = ~used
            free[0] = False
            reduced = C[i0 - 1] - u[i0] - v[1:]
            better = free[1:] & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            candidates = np.where(free, minv, np.inf)
            j1 = int(np.argmin(candidates))
            delta = candidates[j1]
            used_rows = row_of[used]
            u[used_rows] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if row_of[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of[j0] = row_of[j1]
            j0 = j1
    cols = np.empty(n, dtype=np.int64)
    cols[row_of[1:] - 1] = np.arange(n)
    # fsum: exactly rounded, so the total does not depend on row order
    return cols, math.fsum(C[np.arange(n), cols].tolist())


def nemd(Y, Z):
    """Normalized earth mover's distance between two equal-size point sets.

    With uniform weights on both sides the optimal transport plan can be
    taken to be a permutation, so this is the optimal assignment cost
    divided by ``N``.
    """
    Y, Z = _points(Y, "Y"), _points(Z, "Z")
    if Y.shape[0] != Z.shape[0]:
        raise PreconditionError(
            f"nEMD needs equal sizes, got {Y.shape[0]} and {Z.shape[0]}")
    _, cost = linear_assignment(cost_matrix(Y, Z))
    return cost / Y.shape[0]


def hausdorff(Y, Z):
    """Two-sided Hausdorff distance between finite point sets."""
    D = cost_matrix(Y, Z)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
