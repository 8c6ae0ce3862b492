"""Numerical checks of the sample-complexity thresholds.

With exact tangent spaces, the kernel of Sigma equals the intersection of
the spaces S_{x_i} M = {A : A x_i in T_{x_i} M}. It always contains the
symmetry algebra, and for a generic sample of size ``n_star(M)`` it equals
it for subspaces, affine subspaces, quadrics and cones with ``d >= 3``.
Generic samples are taken to be draws from the canonical sampler. A draw
can be generic yet so close to a degenerate configuration that double
precision cannot resolve the rank; :func:`exact_kernel_dim` settles such
cases in rational arithmetic.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import UnsupportedManifoldError
from .lie_pca import sigma_matrix
from .manifolds import AnalyticManifold, cone
from .numerics import DEFAULT_RANK_TOL, sym_eig

DEFAULT_GAP_RATIO = 1e-6


@dataclass
class TrialRecord:
    trial: int
    seed: int
    n: int
    kernel_dim: int
    expected_kernel_dim: int
    relation: str
    passed: bool
    inconclusive: bool = False
    rank: int = 0
    branch: str = ""


@dataclass
class ComplexityReport:
    """Outcome of a threshold verification; serializable via :meth:`to_dict`."""

    manifold: dict
    n_star: int
    sym_dim: int
    trials: int
    records: list = field(default_factory=list)
    conclusion: str = "fail"

    @property
    def passed(self):
        return self.conclusion == "pass"

    def to_dict(self):
        out = asdict(self)
        out["records"] = [asdict(r) for r in self.records]
        return out


def _exact_frames(manifold, X):
    return [manifold.exact_tangent(x) for x in X]


def _spectrum(manifold, X):
    d = manifold.ambient_dim
    if len(X) == 0:
        return np.zeros(d * d)
    return sym_eig(sigma_matrix(X, _exact_frames(manifold, X)))[0]


def _rank_from_spectrum(w, rel_tol):
    lam_max = float(np.max(w)) if w.size else 0.0
    if lam_max <= 0.0:
        return 0, lam_max
    return int(np.sum(w > rel_tol * lam_max)), lam_max


def kernel_dim_at(manifold, n, seed, rel_tol=DEFAULT_RANK_TOL):
    """Dimension of ker Sigma for ``n`` exact-tangent samples drawn with ``seed``."""
    X = manifold.sample(n, seed)
    w = _spectrum(manifold, X)
    rank, _ = _rank_from_spectrum(w, rel_tol)
    return manifold.ambient_dim ** 2 - rank


def _check_threshold(manifold):
    if manifold.kind == "Torus3D":
        raise UnsupportedManifoldError("threshold unknown for this manifold")
    if manifold.kind == "Cone" and manifold.ambient_dim == 2:
        raise UnsupportedManifoldError(
            "the planar cone has no finite generic threshold; "
            "use verify_cone_d2_failure")


def verify_threshold(manifold, trials=20, seeds=None, rel_tol=DEFAULT_RANK_TOL,
                     gap_ratio=DEFAULT_GAP_RATIO):
    """Check that ``n_star`` generic samples pin down the symmetry algebra.

    For each trial, the first ``n_star - 1`` and all ``n_star`` points of one
    draw are used. Below the threshold the kernel must be strictly larger
    than ``sym(M)``; at the threshold it must match it exactly. A threshold
    record whose smallest expected-nonzero eigenvalue is below
    ``gap_ratio * lambda_max`` is inconclusive and does not pass: the draw
    is too close to a degenerate configuration to separate kernel from
    ill-conditioning in double precision.
    """
    _check_threshold(manifold)
    seeds = list(range(trials)) if seeds is None else list(seeds)[:trials]
    d2 = manifold.ambient_dim ** 2
    ns = manifold.n_star()
    sym = manifold.sym_dim
    report = ComplexityReport(manifold.to_dict(), ns, sym, len(seeds))
    for t, seed in enumerate(seeds):
        X = manifold.sample(ns, seed)
        w_below = _spectrum(manifold, X[: ns - 1])
        rank, _ = _rank_from_spectrum(w_below, rel_tol)
        kernel = d2 - rank
        report.records.append(TrialRecord(t, seed, ns - 1, kernel, sym, "gt",
                                          kernel > sym, rank=rank))
        w = _spectrum(manifold, X)
        rank, lam_max = _rank_from_spectrum(w, rel_tol)
        kernel = d2 - rank
        expected_rank = d2 - sym
        smallest = np.sort(w)[::-1][expected_rank - 1] if expected_rank > 0 else lam_max
        inconclusive = not (lam_max > 0 and smallest >= gap_ratio * lam_max)
        report.records.append(TrialRecord(t, seed, ns, kernel, sym, "eq",
                                          kernel == sym and not inconclusive,
                                          inconclusive, rank=rank))
    report.conclusion = "pass" if all(r.passed for r in report.records) else "fail"
    return report


def _planar_cone_points(rng, n, branch):
    s = rng.uniform(0.5, 1.5, n) * rng.choice([-1.0, 1.0], n)
    if branch == "single":
        other = np.ones(n)
    else:
        other = rng.choice([-1.0, 1.0], n)
        other[0], other[1] = 1.0, -1.0
    return np.stack([s, s * other], axis=1)


def verify_cone_d2_failure(trials=20, seeds=None, ns=(2, 5, 20),
                           rel_tol=DEFAULT_RANK_TOL, mixed_fraction=0.95):
    """Show that samples from one branch of the planar cone never suffice.

    Points drawn from the branch ``x_1 = x_2`` leave a three-dimensional
    kernel for every ``n``, although the symmetry algebra has dimension two.
    Samples meeting both branches reach the algebra with ``n = 2``. The
    report passes when every single-branch record has kernel dimension 3
    and at least ``mixed_fraction`` of the mixed records have dimension 2.
    """
    M = cone(1, 1)
    seeds = list(range(trials)) if seeds is None else list(seeds)[:trials]
    sym = M.sym_dim
    report = ComplexityReport(M.to_dict(), M.n_star(), sym, len(seeds))
    for t, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        for n in ns:
            X = _planar_cone_points(rng, n, "single")
            rank, _ = _rank_from_spectrum(_spectrum(M, X), rel_tol)
            report.records.append(TrialRecord(t, seed, n, 4 - rank, sym + 1, "eq",
                                              4 - rank == sym + 1, rank=rank,
                                              branch="single"))
        X = _planar_cone_points(rng, 2, "mixed")
        rank, _ = _rank_from_spectrum(_spectrum(M, X), rel_tol)
        report.records.append(TrialRecord(t, seed, 2, 4 - rank, sym, "eq",
                                          4 - rank == sym, rank=rank, branch="mixed"))
    single = [r for r in report.records if r.branch == "single"]
    mixed = [r for r in report.records if r.branch == "mixed"]
    ok = all(r.passed for r in single) and (
        sum(r.passed for r in mixed) >= mixed_fraction * len(mixed))
    report.conclusion = "pass" if ok else "fail"
    return report


def threshold_zoo():
    """The manifolds whose thresholds are checked by the acceptance suite."""
    zoo = []
    for d in (2, 3, 4):
        for r in range(1, min(2, d - 1) + 1):
            zoo.append(AnalyticManifold("Subspace", {"d": d, "r": r}))
            zoo.append(AnalyticManifold("AffineSubspace", {"d": d, "r": r}))
        for p in range(d, 0, -1):
            zoo.append(AnalyticManifold("Quadric", {"p": p, "q": d - p}))
    for d in (3, 4):
        for p in range(d - 1, 0, -1):
            zoo.append(AnalyticManifold("Cone", {"p": p, "q": d - p}))
    return zoo


def _exact_rank(rows):
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    rows = [list(r) for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        head = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] != 0:
                f = rows[i][col] / head[col]
                rows[i] = [a - f * b for a, b in zip(rows[i], head)]
        rank += 1
    return rank


def exact_kernel_dim(manifold, X):
    """Kernel dimension of Sigma in exact rational arithmetic.

    The range of Sigma is spanned by the rank-one matrices ``z x_i^T`` with
    ``z`` a normal vector at ``x_i``. For canonical subspaces, affine
    subspaces, quadrics and cones these normals are rational functions of
    the (binary floating point, hence rational) sample coordinates, so the
    rank is decided exactly with no tolerance at all.
    """
    base = manifold._base
    canonical = manifold.gl_transform is None and not (
        {"Q", "basis", "offset"} & set(manifold.params))
    if base not in ("subspace", "affine", "quadric", "cone") or not canonical \
            or manifold.kind in ("Ellipse2D", "Line2D"):
        raise UnsupportedManifoldError("exact certificate needs a canonical model")
    d, r = manifold.ambient_dim, manifold.intrinsic_dim
    S = manifold._S() if base in ("quadric", "cone") else None
    rows = []
    for x in np.asarray(X, dtype=np.float64):
        xq = [Fraction(float(v)) for v in x]
        if S is None:
            normals = [[Fraction(int(i == j)) for i in range(d)] for j in range(r, d)]
        else:
            normals = [[Fraction(int(s)) * v for s, v in zip(S, xq)]]
        for z in normals:
            rows.append([zi * xj for xj in xq for zi in z])
    return d * d - (_exact_rank(rows) if rows else 0)
