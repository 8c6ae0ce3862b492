"""Analytic manifolds with exact samplers, tangent spaces and symmetry algebras.

Every manifold is stored as a canonical model ``M0`` plus an invertible map
``Z``, with ``M = Z M0``. The canonical models are

* ``subspace``: span{e_1, ..., e_r}
* ``affine``: span{e_1, ..., e_r} + e_{r+1}
* ``quadric``: {x : x^T S x = 1} with S = diag(1_p, -1_q)
* ``cone``: {x != 0 : x^T S x = 0} with S = diag(1_p, -1_q)
* ``torus``: the torus of revolution about the z-axis

The named kinds (``Ellipse2D``, ``Hyperbola2D``, ``Line2D``) are canonical
models with a fixed implied transform and their own parameter samplers.
Symmetry algebras transform by conjugation, ``sym(ZM) = Z sym(M) Z^{-1}``,
and tangent spaces by ``T_{Zx} ZM = Z T_x M``.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .exceptions import (EmptyManifoldError, OffManifoldError,
                         PreconditionError, UnsupportedManifoldError)
from .numerics import orthogonal_complement, orthonormalize, vec
from .validation import check_seed

KINDS = ("Subspace", "AffineSubspace", "Quadric", "Cone",
         "Ellipse2D", "Hyperbola2D", "Line2D", "Torus3D")

ON_MANIFOLD_TOL = 1e-8


def _signature_from_matrix(Q):
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise PreconditionError("Q must be a square matrix")
    if not np.allclose(Q, Q.T, atol=1e-10):
        raise PreconditionError("Q must be symmetric")
    if abs(np.linalg.det(Q)) <= 1e-10:
        raise PreconditionError("Q must be full rank (|det Q| > 1e-10)")
    lam, U = np.linalg.eigh(Q)
    order = np.argsort(-np.sign(lam), kind="stable")
    lam, U = lam[order], U[:, order]
    p = int(np.sum(lam > 0))
    Z = U / np.sqrt(np.abs(lam))
    return p, Q.shape[0] - p, Z


@dataclass(frozen=True, eq=False)
class AnalyticManifold:
    """Descriptor of a manifold from the analytic zoo.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    params : dict
        Kind-specific parameters:

        - ``Subspace``: ``d`` and ``r``, or ``basis`` (d x r).
        - ``AffineSubspace``: ``d`` and ``r``, optional ``offset`` (length d),
          which must not lie in the span of the first ``r`` axes.
        - ``Quadric`` / ``Cone``: ``p`` and ``q`` (signature), or ``Q``.
        - ``Ellipse2D``: semi-axes ``a`` and ``b``.
        - ``Hyperbola2D``: sampling range ``t_max`` (default 1.5) for the
          branch parametrization (+-cosh t, sinh t).
        - ``Line2D``: ``half_length`` (default 1.0) of the sampled segment
          of the line x_2 = 1.
        - ``Torus3D``: radii ``R`` and ``rho``.
    gl_transform : array of shape (d, d), optional
        Invertible map applied to the model above.
    """

    kind: str
    params: dict = field(default_factory=dict)
    gl_transform: np.ndarray = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown manifold kind {self.kind!r}")
        base, info, Z = self._canonical()
        if self.gl_transform is not None:
            G = np.asarray(self.gl_transform, dtype=np.float64)
            if G.shape != (info["d"], info["d"]):
                raise PreconditionError(
                    f"gl_transform must be {info['d']}x{info['d']}, got {G.shape}")
            if abs(np.linalg.det(G)) <= 1e-10:
                raise PreconditionError("gl_transform is singular")
            object.__setattr__(self, "gl_transform", G)
            Z = G @ Z
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "_info", info)
        object.__setattr__(self, "_Z", Z)
        object.__setattr__(self, "_Zinv", np.linalg.inv(Z))

    def _canonical(self):
        k, prm = self.kind, self.params
        if k == "Subspace":
            if "basis" in prm:
                B = orthonormalize(np.asarray(prm["basis"], dtype=np.float64))
                d, r = B.shape
                Z = np.hstack([B, orthogonal_complement(B)])
            else:
                d, r = int(prm["d"]), int(prm["r"])
                Z = np.eye(d)
            if not 0 <= r < d:
                raise PreconditionError("Subspace needs 0 <= r < d")
            return "subspace", {"d": d, "r": r}, Z
        if k in ("AffineSubspace", "Line2D"):
            if k == "Line2D":
                d, r = 2, 1
            else:
                d, r = int(prm["d"]), int(prm["r"])
            if not 0 <= r < d:
                raise PreconditionError("AffineSubspace needs 0 <= r < d")
            Z = np.eye(d)
            if "offset" in prm:
                c = np.asarray(prm["offset"], dtype=np.float64)
                if c.shape != (d,) or np.linalg.norm(c[r:]) <= 1e-10:
                    raise PreconditionError(
                        "offset must have length d and leave the span of e_1..e_r")
                j = r + int(np.argmax(np.abs(c[r:])))
                Z[:, j] = Z[:, r]
                Z[:, r] = c
            return "affine", {"d": d, "r": r}, Z
        if k in ("Quadric", "Cone"):
            if "Q" in prm:
                p, q, Z = _signature_from_matrix(prm["Q"])
            else:
                p, q = int(prm["p"]), int(prm["q"])
                Z = np.eye(p + q)
            d = p + q
            if p < 0 or q < 0 or d < 1:
                raise PreconditionError("signature must satisfy p, q >= 0, p + q >= 1")
            if k == "Quadric" and p == 0:
                raise EmptyManifoldError("x^T Q x = 1 is empty for negative definite Q")
            if k == "Cone" and (p == 0 or q == 0):
                raise EmptyManifoldError("cone is empty for definite Q")
            return k.lower(), {"d": d, "r": d - 1, "p": p, "q": q}, Z
        if k == "Ellipse2D":
            a, b = float(prm.get("a", 1.0)), float(prm.get("b", 1.0))
            if a <= 0 or b <= 0:
                raise PreconditionError("ellipse semi-axes must be positive")
            return "quadric", {"d": 2, "r": 1, "p": 2, "q": 0}, np.diag([a, b])
        if k == "Hyperbola2D":
            return "quadric", {"d": 2, "r": 1, "p": 1, "q": 1}, np.eye(2)
        R, rho = float(prm.get("R", 2.0)), float(prm.get("rho", 0.5))
        if not 0 < rho < R:
            raise PreconditionError("torus radii need 0 < rho < R")
        return "torus", {"d": 3, "r": 2, "R": R, "rho": rho}, np.eye(3)

    # ------------------------------------------------------------------ shape
    @property
    def ambient_dim(self):
        return self._info["d"]

    @property
    def intrinsic_dim(self):
        return self._info["r"]

    @property
    def transform(self):
        """The full map ``Z`` taking the canonical model onto this manifold."""
        return self._Z.copy()

    @property
    def signature(self):
        return self._info.get("p"), self._info.get("q")

    def diameter(self):
        """Diameter of a compact zoo member."""
        if self.kind == "Ellipse2D" or (self._base == "quadric" and self._info["q"] == 0):
            return 2.0 * float(np.linalg.norm(self._Z, 2))
        if self._base == "torus" and self.gl_transform is None:
            return 2.0 * (self._info["R"] + self._info["rho"])
        raise UnsupportedManifoldError(f"{self.kind} is not compact")

    # ------------------------------------------------------------- geometry
    def _to_canonical(self, x):
        return self._Zinv @ np.asarray(x, dtype=np.float64)

    def implicit_residual(self, x):
        """Residual of the canonical defining equations at ``x``.

        Zero exactly on the manifold. The cone residual is scaled by
        ``|x0|^2`` so that it does not depend on the distance to the apex.
        """
        x0 = self._to_canonical(x)
        info = self._info
        if self._base == "subspace":
            return float(np.linalg.norm(x0[info["r"]:]))
        if self._base == "affine":
            tail = x0[info["r"]:].copy()
            tail[0] -= 1.0
            return float(np.linalg.norm(tail))
        if self._base in ("quadric", "cone"):
            S = self._S()
            val = float(x0 @ (S * x0))
            if self._base == "quadric":
                return abs(val - 1.0)
            nrm = float(x0 @ x0)
            return abs(val) / nrm if nrm > 0 else np.inf
        R, rho = info["R"], info["rho"]
        return abs((np.hypot(x0[0], x0[1]) - R) ** 2 + x0[2] ** 2 - rho ** 2)

    def contains(self, x, tol=ON_MANIFOLD_TOL):
        return self.implicit_residual(x) <= tol

    def _S(self):
        return np.concatenate([np.ones(self._info["p"]), -np.ones(self._info["q"])])

    def _canonical_tangent(self, x0):
        d, r = self._info["d"], self._info["r"]
        if self._base in ("subspace", "affine"):
            return np.eye(d)[:, :r]
        if self._base in ("quadric", "cone"):
            normal = self._S() * x0
            return orthogonal_complement(normal[:, None] / np.linalg.norm(normal))
        R, rho = self._info["R"], self._info["rho"]
        theta = np.arctan2(x0[1], x0[0])
        phi = np.arctan2(x0[2], np.hypot(x0[0], x0[1]) - R)
        d_theta = np.array([-np.sin(theta), np.cos(theta), 0.0])
        d_phi = np.array([-np.sin(phi) * np.cos(theta),
                          -np.sin(phi) * np.sin(theta), np.cos(phi)])
        return np.stack([d_theta, d_phi], axis=1)

    def exact_tangent(self, x, tol=ON_MANIFOLD_TOL):
        """Orthonormal basis (d x r) of the tangent space at ``x``.

        Raises
        ------
        OffManifoldError
            If ``x`` is off the manifold or is the apex of a cone.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.ambient_dim,):
            raise PreconditionError(f"point must have shape ({self.ambient_dim},)")
        if self._base == "cone" and not np.any(x):
            raise OffManifoldError("the cone excludes the origin")
        res = self.implicit_residual(x)
        if not res <= tol:
            raise OffManifoldError(f"point is off the manifold (residual {res:.3g})")
        T0 = self._canonical_tangent(self._to_canonical(x))
        return orthonormalize(self._Z @ T0)

    def exact_normal(self, x, tol=ON_MANIFOLD_TOL):
        return orthogonal_complement(self.exact_tangent(x, tol))

    # ------------------------------------------------------------- symmetry
    def _canonical_sym_matrices(self):
        d, r = self._info["d"], self._info["r"]
        mats = []

        def unit(i, j):
            E = np.zeros((d, d))
            E[i, j] = 1.0
            return E

        if self._base in ("subspace", "affine"):
            for j in range(d):
                for i in range(d):
                    if i >= r and j < r:
                        continue
                    if self._base == "affine" and i >= r and j == r:
                        continue
                    mats.append(unit(i, j))
        elif self._base in ("quadric", "cone"):
            S = self._S()
            for i in range(d):
                for j in range(i + 1, d):
                    sign = -1.0 if S[i] == S[j] else 1.0
                    mats.append((unit(i, j) + sign * unit(j, i)) / np.sqrt(2.0))
            if self._base == "cone":
                mats.append(np.eye(d) / np.sqrt(d))
        else:
            mats.append((unit(1, 0) - unit(0, 1)) / np.sqrt(2.0))
        return mats

    def sym_matrices(self):
        """Generators of the symmetry algebra as an array (ell, d, d).

        Returned matrices are orthonormal under the Frobenius inner product.
        For ``Torus3D`` only the rotation about the z-axis is exposed.
        """
        d = self.ambient_dim
        B = self.exact_sym_basis()
        return np.stack([B[:, j].reshape((d, d), order="F") for j in range(B.shape[1])])

    def exact_sym_basis(self):
        """Orthonormal basis (d*d x ell) of the symmetry algebra, vec'd column-major."""
        mats = [self._Z @ A @ self._Zinv for A in self._canonical_sym_matrices()]
        return orthonormalize(vec(np.stack(mats)))

    @property
    def sym_dim(self):
        d, r = self._info["d"], self._info["r"]
        if self._base == "subspace":
            return d * d - r * (d - r)
        if self._base == "affine":
            return d * d - (r + 1) * (d - r)
        if self._base == "quadric":
            return comb(d, 2)
        if self._base == "cone":
            return comb(d, 2) + 1
        return 1

    def n_star(self):
        """Information-theoretic sample lower bound codim sym(M) / codim M."""
        if self._base == "torus":
            raise UnsupportedManifoldError(
                "the symmetry algebra of the torus is not characterized; threshold unknown")
        d, r = self._info["d"], self._info["r"]
        num = d * d - self.sym_dim
        if num % (d - r):
            raise RuntimeError(f"non-integral n_star {num}/{d - r} for {self.kind}")
        return num // (d - r)

    # ------------------------------------------------------------- sampling
    def _sample_canonical(self, n, rng):
        d, r = self._info["d"], self._info["r"]
        prm = self.params
        if self.kind == "Ellipse2D":
            t = rng.uniform(0.0, 2 * np.pi, n)
            return np.stack([np.cos(t), np.sin(t)], axis=1)
        if self.kind == "Hyperbola2D":
            t_max = float(prm.get("t_max", 1.5))
            t = rng.uniform(-t_max, t_max, n)
            branch = rng.choice([-1.0, 1.0], n)
            return np.stack([branch * np.cosh(t), np.sinh(t)], axis=1)
        if self.kind == "Line2D":
            half = float(prm.get("half_length", 1.0))
            t = rng.uniform(-half, half, n)
            return np.stack([t, np.ones(n)], axis=1)
        if self._base in ("subspace", "affine"):
            X = np.zeros((n, d))
            X[:, :r] = rng.uniform(-1.0, 1.0, (n, r))
            if self._base == "affine":
                X[:, r] = 1.0
            return X
        if self._base == "quadric":
            S = self._S()
            out = np.empty((n, d))
            filled = 0
            while filled < n:
                g = rng.standard_normal(d)
                val = g @ (S * g)
                if val > 0:
                    out[filled] = g / np.sqrt(val)
                    filled += 1
            return out
        if self._base == "cone":
            p, q = self._info["p"], self._info["q"]
            y = rng.standard_normal((n, p))
            y /= np.linalg.norm(y, axis=1, keepdims=True)
            z = rng.standard_normal((n, q))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            s = rng.uniform(0.5, 1.5, n)[:, None]
            return s * np.hstack([y, z])
        R, rho = self._info["R"], self._info["rho"]
        theta = rng.uniform(0.0, 2 * np.pi, n)
        phi = rng.uniform(0.0, 2 * np.pi, n)
        ring = R + rho * np.cos(phi)
        return np.stack([ring * np.cos(theta), ring * np.sin(theta), rho * np.sin(phi)], axis=1)

    def sample(self, n, seed=0, noise_sigma=0.0):
        """Draw ``n`` i.i.d. points, plus isotropic Gaussian noise.

        Deterministic in ``seed``.

        Returns
        -------
        X : array of shape (n, d)
        """
        if int(n) != n or n < 1:
            raise PreconditionError("n must be a positive integer")
        if noise_sigma < 0:
            raise PreconditionError("noise_sigma must be non-negative")
        rng = np.random.default_rng(check_seed(seed))
        X = self._sample_canonical(int(n), rng) @ self._Z.T
        if noise_sigma > 0:
            X = X + noise_sigma * rng.standard_normal(X.shape)
        return X

    # ---------------------------------------------------------- serialization
    def to_dict(self):
        params = {k: (np.asarray(v).tolist() if isinstance(v, (np.ndarray, list, tuple)) else v)
                  for k, v in self.params.items()}
        out = {"kind": self.kind, "params": params}
        if self.gl_transform is not None:
            out["gl_transform"] = self.gl_transform.tolist()
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "kind" not in data:
            raise PreconditionError("manifold JSON needs a 'kind' field")
        G = data.get("gl_transform")
        return cls(data["kind"], dict(data.get("params", {})),
                   None if G is None else np.asarray(G, dtype=np.float64))

    def __repr__(self):
        extra = ", gl_transform=..." if self.gl_transform is not None else ""
        return f"AnalyticManifold({self.kind!r}, {self.params!r}{extra})"


def apply_gl(manifold, Z):
    """The manifold ``Z M`` for an invertible ``Z``."""
    Z = np.asarray(Z, dtype=np.float64)
    d = manifold.ambient_dim
    if Z.shape != (d, d):
        raise PreconditionError(f"Z must be {d}x{d}")
    if abs(np.linalg.det(Z)) <= 1e-10:
        raise PreconditionError("Z is singular")
    G = Z if manifold.gl_transform is None else Z @ manifold.gl_transform
    return AnalyticManifold(manifold.kind, dict(manifold.params), G)


def sample(manifold, n, rng_seed=0, noise_sigma=0.0):
    return manifold.sample(n, rng_seed, noise_sigma)


def exact_tangent(manifold, x):
    return manifold.exact_tangent(x)


def exact_sym_basis(manifold):
    return manifold.exact_sym_basis()


def n_star(manifold):
    return manifold.n_star()


# Convenience constructors for the common zoo members.

def subspace(d, r):
    return AnalyticManifold("Subspace", {"d": d, "r": r})


def affine_subspace(d, r):
    return AnalyticManifold("AffineSubspace", {"d": d, "r": r})


def sphere(d):
    return AnalyticManifold("Quadric", {"p": d, "q": 0})


def hyperboloid(p, q):
    return AnalyticManifold("Quadric", {"p": p, "q": q})


def cone(p, q):
    return AnalyticManifold("Cone", {"p": p, "q": q})


def circle():
    return sphere(2)


def ellipse(a, b):
    return AnalyticManifold("Ellipse2D", {"a": a, "b": b})


def hyperbola(t_max=1.5):
    return AnalyticManifold("Hyperbola2D", {"t_max": t_max})


def line(half_length=1.0):
    return AnalyticManifold("Line2D", {"half_length": half_length})


def torus(R=2.0, rho=0.5):
    return AnalyticManifold("Torus3D", {"R": R, "rho": rho})
