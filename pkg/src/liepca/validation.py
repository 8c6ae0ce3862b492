"""Input validation helpers."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import PreconditionError

ORTHONORMAL_TOL = 1e-10


def check_cloud(X, min_samples=1, name="X"):
    """Validate a point cloud and return it as a float64 array of shape (n, d).

    Raises
    ------
    PreconditionError
        If ``X`` is not 2-D, contains non-finite entries or has fewer than
        ``min_samples`` rows.
    """
    try:
        X = check_array(X, dtype=np.float64, ensure_min_samples=min_samples,
                        input_name=name)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    return X


def check_square(S, name="matrix"):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise PreconditionError(f"{name} must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise PreconditionError(f"{name} has non-finite entries")
    return S


def check_orthonormal(U, tol=ORTHONORMAL_TOL, name="basis"):
    """Validate a basis stored as the columns of a (dim, k) array."""
    U = np.asarray(U, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    if U.ndim != 2:
        raise PreconditionError(f"{name} must be 2-D (dim, k), got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise PreconditionError(f"{name} has non-finite entries")
    gram = U.T @ U
    err = np.max(np.abs(gram - np.eye(U.shape[1])), initial=0.0)
    if err > tol:
        raise PreconditionError(
            f"{name} is not orthonormal (max Gram deviation {err:.3g})")
    return U


def check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise PreconditionError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise PreconditionError("seed must be non-negative")
    return int(seed)
