"""Lie PCA: spectral estimation of a manifold's symmetry Lie algebra.

Given sample points ``x_i`` and tangent estimates ``T_i``, the operator

    Sigma(A) = sum_i proj_{T_i^perp} A proj_{span{x_i}}

is positive semidefinite on R^{d x d}. Every generator ``A`` of a symmetry
satisfies ``A x in T_x M`` and is therefore annihilated by each summand,
so the bottom eigenvectors of Sigma estimate the symmetry algebra.

Matrices are flattened column-major (``vec``), under which the summand is
the Kronecker product ``proj_{span{x}} (x) proj_{T^perp}``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import OriginPointError, PreconditionError
from .numerics import orthonormalize, projector, sym_eig, unvec, vec
from .tangent import TangentFrame, local_pca
from .validation import check_cloud

DEGENERATE_GAP_RATIO = 1e-6


class DegenerateSpectrumWarning(UserWarning):
    """The bottom eigenspace is not separated from the rest of the spectrum."""


def annihilator_term(x, T):
    """Matrix (d*d x d*d) of ``A -> proj_{T^perp} A proj_{span{x}}``.

    Parameters
    ----------
    x : array of shape (d,)
        Nonzero base point.
    T : array of shape (d, r)
        Orthonormal basis of the tangent estimate at ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.any(x):
        raise OriginPointError(None, "annihilator term is undefined at x = 0")
    d = x.shape[0]
    T = np.asarray(T, dtype=np.float64).reshape(d, -1)
    P_normal = np.eye(d) - projector(T)
    P_point = np.outer(x, x) / (x @ x)
    K = np.kron(P_point, P_normal)
    return (K + K.T) / 2


@dataclass(frozen=True, eq=False)
class LiePcaOperator:
    """The Lie PCA operator Sigma with its full spectrum.

    ``matrix`` acts on column-major vec'd d x d matrices. ``spectrum`` is
    ascending and ``eigvecs[:, k]`` pairs with ``spectrum[k]``.
    """

    d: int
    matrix: np.ndarray
    spectrum: np.ndarray
    eigvecs: np.ndarray
    n_terms: int = 0

    def apply(self, A):
        """Evaluate Sigma(A) for a d x d matrix."""
        return unvec(self.matrix @ vec(np.asarray(A, dtype=np.float64)), self.d)

    @property
    def lambda_max(self):
        return float(max(self.spectrum[-1], 0.0))


def _frame_bases(frames, n, d):
    if isinstance(frames, np.ndarray) and frames.ndim == 3:
        bases = list(frames)
    else:
        bases = [f.basis if isinstance(f, TangentFrame) else np.asarray(f, dtype=np.float64)
                 for f in frames]
    if len(bases) != n:
        raise PreconditionError(f"got {len(bases)} tangent frames for {n} points")
    return [np.asarray(B, dtype=np.float64).reshape(d, -1) for B in bases]


def sigma_matrix(X, frames):
    """Sum of annihilator terms, without the eigendecomposition."""
    X = check_cloud(X)
    n, d = X.shape
    bases = _frame_bases(frames, n, d)
    norms = np.einsum("ij,ij->i", X, X)
    bad = np.flatnonzero(norms == 0)
    if bad.size:
        raise OriginPointError(int(bad[0]))
    S = np.zeros((d * d, d * d))
    for x, T in zip(X, bases):
        S += annihilator_term(x, T)
    return (S + S.T) / 2


def build_sigma(X, frames):
    """Assemble the Lie PCA operator from points and tangent frames.

    Parameters
    ----------
    X : array of shape (n, d)
    frames : list of TangentFrame, list of (d, r) arrays, or array (n, d, r)

    Raises
    ------
    OriginPointError
        If some sample point is the origin; ``.index`` names it.
    """
    S = sigma_matrix(X, frames)
    X = np.asarray(X)
    w, V = sym_eig(S)
    return LiePcaOperator(X.shape[1], S, w, V, X.shape[0])


@dataclass(frozen=True, eq=False)
class LieAlgebraEstimate:
    """Span of the ``ell`` bottom eigenvectors of Sigma, reshaped to matrices.

    Attributes
    ----------
    basis : ndarray of shape (ell, d, d)
        Frobenius-orthonormal matrices.
    bottom_eigenvalues : ndarray of shape (ell,)
    gap : float
        ``lambda_{ell+1} - lambda_ell``; infinite when ``ell == d*d``.
    degenerate : bool
        Whether the gap is at most ``1e-6 * lambda_max``.
    """

    d: int
    ell: int
    basis: np.ndarray
    bottom_eigenvalues: np.ndarray
    gap: float
    degenerate: bool = False
    spectrum: np.ndarray = field(default=None)

    def basis_vectors(self):
        """The basis as orthonormal columns of a (d*d, ell) array."""
        return vec(self.basis)

    def to_dict(self):
        out = {
            "d": self.d,
            "ell": self.ell,
            "eigenvalues": self.bottom_eigenvalues.tolist(),
            "basis": [B.reshape(-1).tolist() for B in self.basis],
            "gap": float(self.gap),
            "degenerate": bool(self.degenerate),
        }
        if self.spectrum is not None:
            out["spectrum"] = np.asarray(self.spectrum).tolist()
        return out

    @classmethod
    def from_dict(cls, data):
        d, ell = int(data["d"]), int(data["ell"])
        basis = np.asarray(data["basis"], dtype=np.float64).reshape(ell, d, d)
        spectrum = data.get("spectrum")
        return cls(d, ell, basis, np.asarray(data["eigenvalues"], dtype=np.float64),
                   float(data["gap"]), bool(data.get("degenerate", False)),
                   None if spectrum is None else np.asarray(spectrum, dtype=np.float64))

    @classmethod
    def from_matrices(cls, matrices):
        """Estimate spanned by given generators (orthonormalized), e.g. an exact algebra."""
        M = np.asarray(matrices, dtype=np.float64)
        if M.ndim == 2:
            M = M[None]
        d = M.shape[1]
        B = orthonormalize(vec(M))
        basis = np.stack([unvec(B[:, j], d) for j in range(B.shape[1])])
        return cls(d, basis.shape[0], basis, np.zeros(basis.shape[0]), np.inf)


def estimate_lie_algebra(op, ell):
    """Bottom-``ell`` eigenspace of Sigma as a Lie algebra estimate.

    Warns with :class:`DegenerateSpectrumWarning` when the spectral gap is too
    small for the span to be stable; the estimate is still returned.
    """
    dim = op.d * op.d
    if int(ell) != ell or not 1 <= ell <= dim:
        raise PreconditionError(f"ell must be in [1, {dim}], got {ell}")
    ell = int(ell)
    w = op.spectrum
    gap = float(w[ell] - w[ell - 1]) if ell < dim else np.inf
    degenerate = bool(gap <= DEGENERATE_GAP_RATIO * op.lambda_max)
    if degenerate:
        warnings.warn(
            f"spectral gap {gap:.3g} after eigenvalue {ell} is below "
            f"{DEGENERATE_GAP_RATIO:g} * lambda_max; the estimated span is unstable",
            DegenerateSpectrumWarning, stacklevel=2)
    basis = np.stack([unvec(op.eigvecs[:, j], op.d) for j in range(ell)])
    return LieAlgebraEstimate(op.d, ell, basis, w[:ell].copy(), gap, degenerate, w.copy())


class LiePCA(BaseEstimator):
    """Estimate the symmetry Lie algebra of the manifold underlying a sample.

    Parameters
    ----------
    n_neighbors : int, default=2
        Neighbours used by local PCA for the tangent estimates.
    intrinsic_dim : int, default=1
        Dimension ``r`` of the manifold.
    algebra_dim : int, default=1
        Dimension ``ell`` of the Lie algebra to return.

    Attributes
    ----------
    frames_ : list of TangentFrame
    operator_ : LiePcaOperator
    estimate_ : LieAlgebraEstimate
    components_ : ndarray of shape (algebra_dim, d, d)
    eigenvalues_ : ndarray of shape (d*d,)
        Full ascending spectrum of Sigma.
    spectral_gap_ : float
    """

    def __init__(self, n_neighbors=2, intrinsic_dim=1, algebra_dim=1):
        self.n_neighbors = n_neighbors
        self.intrinsic_dim = intrinsic_dim
        self.algebra_dim = algebra_dim

    def fit(self, X, y=None, tangent_frames=None):
        """Fit on a sample; pass ``tangent_frames`` to skip local PCA."""
        X = check_cloud(X)
        if tangent_frames is None:
            tangent_frames = local_pca(X, self.n_neighbors, self.intrinsic_dim)
        self.frames_ = tangent_frames
        self.operator_ = build_sigma(X, tangent_frames)
        self.estimate_ = estimate_lie_algebra(self.operator_, self.algebra_dim)
        self.components_ = self.estimate_.basis
        self.eigenvalues_ = self.operator_.spectrum
        self.spectral_gap_ = self.estimate_.gap
        self.n_features_in_ = X.shape[1]
        return self
