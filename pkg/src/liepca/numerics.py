"""Dense small-matrix numerics.

Bases are stored column-wise: an orthonormal basis of a ``k``-dimensional
subspace of R^m is an ``(m, k)`` array whose columns are orthonormal. A basis
of matrices (for instance a Lie algebra inside R^{d x d}) is stored the same
way after column-major flattening, see :func:`vec` and :func:`unvec`.
"""

import math

import numpy as np

from .exceptions import NotPSDError, PreconditionError
from .validation import check_orthonormal, check_square

DEFAULT_RANK_TOL = 1e-8


def vec(A):
    """Column-major flattening of a matrix (or a stack of matrices)."""
    A = np.asarray(A)
    if A.ndim == 2:
        return A.reshape(-1, order="F")
    return np.stack([a.reshape(-1, order="F") for a in A], axis=1)


def unvec(v, d):
    """Inverse of :func:`vec` for a single d*d vector."""
    return np.asarray(v).reshape((d, d), order="F")


def projector(U):
    """Orthogonal projector ``U U^T`` onto the span of an orthonormal basis.

    Parameters
    ----------
    U : array of shape (m, k)
        Orthonormal columns. ``k`` may be zero.

    Returns
    -------
    P : array of shape (m, m)
    """
    U = check_orthonormal(U)
    P = U @ U.T
    return (P + P.T) / 2


def orthonormalize(V, tol=1e-12):
    """Orthonormal basis of the column span of ``V``.

    Modified Gram-Schmidt with a second re-orthogonalization pass. Columns
    whose residual norm falls below ``tol`` times their original norm are
    dropped, so the result may have fewer columns than ``V``.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    basis = []
    for j in range(V.shape[1]):
        v = V[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            continue
        for _ in range(2):
            for u in basis:
                v -= (u @ v) * u
        nv = np.linalg.norm(v)
        if nv <= tol * norm0:
            continue
        basis.append(v / nv)
    if not basis:
        return np.zeros((V.shape[0], 0))
    return np.stack(basis, axis=1)


def orthogonal_complement(U):
    """Orthonormal basis of the orthogonal complement of span(U)."""
    U = np.asarray(U, dtype=np.float64)
    m = U.shape[0]
    full = orthonormalize(np.hstack([U, np.eye(m)]))
    return full[:, U.shape[1]:]


def _jacobi_sweeps(A, max_sweeps=60):
    """Cyclic Jacobi with round-robin (parallel) ordering.

    Each round rotates ``n // 2`` disjoint index pairs at once, so a sweep
    is ``n - 1`` rounds of two small matrix products.
    """
    n = A.shape[0]
    V = np.eye(n)
    m = n + (n % 2)
    order = np.arange(m)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return A, V
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * scale:
            break
        for _ in range(m - 1):
            p, q = order[: m // 2], order[m - 1: m // 2 - 1: -1]
            keep = (p < n) & (q < n)
            p, q = p[keep], q[keep]
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if np.any(active):
                p, q, apq = p[active], q[active], apq[active]
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t[theta == 0] = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                G = np.eye(n)
                G[p, p] = c
                G[q, q] = c
                G[p, q] = s
                G[q, p] = -s
                A = G.T @ A @ G
                A = (A + A.T) / 2
                A[p, q] = 0.0
                A[q, p] = 0.0
                V = V @ G
            order[1:] = np.roll(order[1:], 1)
    return A, V


def sym_eig(S):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    ``S`` is symmetrized as ``(S + S^T) / 2`` first.

    Returns
    -------
    eigenvalues : array of shape (n,)
        Sorted ascending.
    eigenvectors : array of shape (n, n)
        Orthonormal columns; column ``k`` pairs with ``eigenvalues[k]``.
        Within a degenerate eigenspace the columns are an arbitrary
        orthonormal basis.
    """
    S = check_square(S, "S")
    A = (S + S.T) / 2
    n = A.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    D, V = _jacobi_sweeps(A.copy())
    w = np.diag(D).copy()
    idx = np.argsort(w, kind="stable")
    return w[idx], V[:, idx]


def mat_exp(A):
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    The matrix is scaled by ``2**-s`` with ``s = max(0, ceil(log2 ||A||_1))``,
    the series is summed until a term's 1-norm drops below 1e-16 and the
    result is squared ``s`` times.
    """
    A = check_square(A, "A")
    n = A.shape[0]
    norm1 = np.linalg.norm(A, 1) if n else 0.0
    s = max(0, math.ceil(math.log2(norm1))) if norm1 > 0 else 0
    B = A / (2.0 ** s)
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 200):
        term = term @ B / k
        result = result + term
        if np.linalg.norm(term, 1) < 1e-16:
            break
    for _ in range(s):
        result = result @ result
    return result


def numerical_rank(S, rel_tol=DEFAULT_RANK_TOL, eigenvalues=None):
    """Number of eigenvalues of a PSD matrix exceeding ``rel_tol * lambda_max``.

    Pass precomputed ``eigenvalues`` to skip the eigendecomposition.

    Raises
    ------
    NotPSDError
        If some eigenvalue is below ``-rel_tol * |lambda_max|``.
    """
    if eigenvalues is None:
        eigenvalues = sym_eig(S)[0]
    w = np.asarray(eigenvalues, dtype=np.float64)
    if w.size == 0:
        return 0
    lam_max = np.max(np.abs(w))
    if lam_max == 0.0:
        return 0
    if np.min(w) < -rel_tol * lam_max:
        raise NotPSDError(
            f"matrix is not PSD: eigenvalue {np.min(w):.3g} with lambda_max {lam_max:.3g}")
    return int(np.sum(w > rel_tol * lam_max))


def subspace_distance(U, V):
    """Chordal distance ``||P_U - P_V||_F / sqrt(2)`` between two spans.

    Equals ``sqrt(sum_k sin^2 theta_k)`` over the principal angles.
    """
    U = check_orthonormal(U, name="U")
    V = check_orthonormal(V, name="V")
    if U.shape != V.shape:
        raise PreconditionError(
            f"bases must have matching shapes, got {U.shape} and {V.shape}")
    diff = U @ U.T - V @ V.T
    return float(np.linalg.norm(diff) / np.sqrt(2.0))
