"""Tangent space estimation by local PCA."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import PreconditionError
from .numerics import orthonormalize, sym_eig
from .validation import check_cloud


@dataclass(frozen=True, eq=False)
class TangentFrame:
    """Estimated tangent space at one sample point.

    ``basis`` holds an orthonormal basis as columns, shape (d, r).
    ``degenerate`` is set when the local covariance had rank below ``r`` and
    the basis was completed arbitrarily inside its null space.
    """

    base_point: np.ndarray
    basis: np.ndarray
    degenerate: bool = False

    def to_dict(self):
        return {"base_point": self.base_point.tolist(),
                "basis": self.basis.T.tolist(),
                "degenerate": bool(self.degenerate)}

    @classmethod
    def from_dict(cls, data):
        basis = np.asarray(data["basis"], dtype=np.float64).T
        return cls(np.asarray(data["base_point"], dtype=np.float64),
                   basis.reshape(len(data["base_point"]), -1),
                   bool(data.get("degenerate", False)))


def pairwise_sq_distances(X, Y=None):
    Y = X if Y is None else Y
    diff = X[:, None, :] - Y[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _neighbor_table(X, k):
    """Indices (n, k) of the k nearest other points, ties by smaller index."""
    D = pairwise_sq_distances(X)
    np.fill_diagonal(D, np.inf)
    # stable argsort keeps the smaller index first among equal distances
    return np.argsort(D, axis=1, kind="stable")[:, :k]


def knn(X, i, k):
    """Indices of the ``k`` nearest points to ``X[i]``, excluding ``i``.

    Euclidean distance, brute force; ties go to the smaller index.
    """
    X = check_cloud(X)
    n = X.shape[0]
    if not 1 <= k <= n - 1:
        raise PreconditionError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    if not 0 <= i < n:
        raise PreconditionError(f"index {i} out of range")
    diff = X - X[i]
    d2 = np.sum(diff * diff, axis=1)
    d2[i] = np.inf
    return np.argsort(d2, kind="stable")[:k]


def _top_directions(C, r):
    w, V = sym_eig(C)
    w, V = w[::-1], V[:, ::-1]
    scale = max(w[0], 0.0)
    rank = int(np.sum(w > 1e-12 * scale)) if scale > 0 else 0
    return orthonormalize(V[:, :r]), rank < r


def local_pca(X, k, r):
    """Estimate an ``r``-dimensional tangent space at every sample point.

    For each point the subcollection is the point itself plus its ``k``
    nearest neighbours. The subcollection is centred at its mean and the
    top-``r`` eigenvectors of its covariance span the estimate.

    Returns
    -------
    frames : list of TangentFrame
    """
    X = check_cloud(X)
    n, d = X.shape
    if not 1 <= r <= d:
        raise PreconditionError(f"r must be in [1, d] = [1, {d}], got {r}")
    if k < r:
        raise PreconditionError(f"k must be at least r, got k={k}, r={r}")
    if n < k + 1:
        raise PreconditionError(f"need n >= k + 1 points, got n={n}, k={k}")
    neighbors = _neighbor_table(X, k)
    frames = []
    for i in range(n):
        patch = X[np.concatenate([[i], neighbors[i]])]
        centred = patch - patch.mean(axis=0)
        basis, degenerate = _top_directions(centred.T @ centred, r)
        frames.append(TangentFrame(X[i].copy(), basis, degenerate))
    return frames


class LocalPCA(BaseEstimator):
    """Local PCA tangent space estimator.

    Parameters
    ----------
    n_neighbors : int, default=2
        Neighbours per point; the point itself is added to its patch.
    n_components : int, default=1
        Intrinsic dimension ``r`` of the estimated tangent spaces.

    Attributes
    ----------
    frames_ : list of TangentFrame
    tangent_bases_ : ndarray of shape (n_samples, d, r)
    degenerate_ : ndarray of shape (n_samples,), bool
    """

    def __init__(self, n_neighbors=2, n_components=1):
        self.n_neighbors = n_neighbors
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_cloud(X)
        self.frames_ = local_pca(X, self.n_neighbors, self.n_components)
        self.tangent_bases_ = np.stack([f.basis for f in self.frames_])
        self.degenerate_ = np.array([f.degenerate for f in self.frames_])
        self.n_features_in_ = X.shape[1]
        return self
