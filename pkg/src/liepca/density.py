"""Density estimators that turn a small sample into many simulated draws.

Every method resamples from its own per-draw random stream: draw ``s`` uses
``numpy.random.default_rng([seed, s])``. Output is therefore independent of
the order or grouping in which draws are produced.

Methods
-------
BL1     resample the given points uniformly
BL2     fresh draws from the true manifold distribution (reference only)
KDE     Gaussian kernel density estimate with Silverman's bandwidth
LPCA    Gaussian steps inside the estimated tangent space, with rejection
LIEPCA  exponentials of random elements of the estimated Lie algebra,
        with rejection
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import PreconditionError
from .lie_pca import LieAlgebraEstimate, build_sigma, estimate_lie_algebra
from .manifolds import AnalyticManifold
from .numerics import mat_exp
from .tangent import TangentFrame, local_pca, pairwise_sq_distances
from .validation import check_cloud, check_seed

METHODS = ("BL1", "BL2", "KDE", "LPCA", "LIEPCA")
BL2_SEED_OFFSET = 1_000_003
NOISE_DIAMETER_FRACTION = 0.05


@dataclass
class EstimatorConfig:
    """Hyperparameters of one density estimation run.

    ``algebra_scale=None`` selects :func:`default_algebra_scale`.
    ``noise_sigma`` is used by BL2 only; ``None`` means noiseless.
    """

    method: str = "LIEPCA"
    n: int = 30
    N: int = 300
    k: int = 2
    r: int = 1
    ell: int = 1
    algebra_scale: float = None
    rejection_factor: float = 2.0
    max_retries: int = 100
    seed: int = 0
    noise_sigma: float = None

    def __post_init__(self):
        self.method = str(self.method).upper()
        if self.method not in METHODS:
            raise PreconditionError(
                f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        for name in ("n", "N", "k", "r", "ell", "max_retries"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise PreconditionError(f"{name} must be an integer, got {value!r}")
            setattr(self, name, int(value))
        if self.N < 1:
            raise PreconditionError(f"N must be at least 1, got {self.N}")
        if self.max_retries < 0:
            raise PreconditionError("max_retries must be non-negative")
        if self.rejection_factor <= 0:
            raise PreconditionError("rejection_factor must be positive")
        if self.algebra_scale is not None and self.algebra_scale < 0:
            raise PreconditionError("algebra_scale must be non-negative")
        self.seed = check_seed(self.seed)

    def to_dict(self):
        return asdict(self)


@dataclass(eq=False)
class SampleSet:
    """Simulated draws with per-draw provenance.

    Attributes
    ----------
    points : ndarray of shape (N, d)
    source : ndarray of shape (N,)
        Index of the given point each draw was generated from; -1 for BL2.
    retries : ndarray of shape (N,)
        Rejected attempts before the draw was kept.
    fallback : ndarray of shape (N,), bool
        Draws kept after exhausting ``max_retries`` although still too far
        from the data.
    """

    points: np.ndarray
    source: np.ndarray
    retries: np.ndarray
    fallback: np.ndarray
    method: str = ""
    info: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]

    def to_dict(self):
        return {
            "method": self.method,
            "points": self.points.tolist(),
            "source": self.source.tolist(),
            "retries": self.retries.tolist(),
            "fallback": self.fallback.tolist(),
            "info": self.info,
        }


def _draw_rng(seed, s):
    return np.random.default_rng([seed, s])


def _plain_set(points, source, method, info=None):
    N = points.shape[0]
    return SampleSet(points, np.asarray(source, dtype=np.int64), np.zeros(N, dtype=np.int64),
                     np.zeros(N, dtype=bool), method, info or {})


def bl1(cloud, cfg):
    """Uniform resampling of the given points."""
    X = check_cloud(cloud, name="cloud")
    n = X.shape[0]
    source = np.array([_draw_rng(cfg.seed, s).integers(n) for s in range(cfg.N)])
    return _plain_set(X[source].copy(), source, "BL1")


def default_noise_sigma(manifold):
    return NOISE_DIAMETER_FRACTION * manifold.diameter()


def bl2(manifold, cfg):
    """``N`` fresh draws from the manifold, seeded ``cfg.seed + BL2_SEED_OFFSET``."""
    if not isinstance(manifold, AnalyticManifold):
        raise PreconditionError("BL2 needs an AnalyticManifold")
    sigma = cfg.noise_sigma or 0.0
    Y = manifold.sample(cfg.N, cfg.seed + BL2_SEED_OFFSET, sigma)
    return _plain_set(Y, np.full(cfg.N, -1), "BL2", {"noise_sigma": sigma})


def silverman_bandwidth(cloud):
    """Silverman's rule ``h = s (4 / ((d + 2) n))^(1 / (d + 4))``.

    ``s`` is the mean over coordinates of the sample standard deviation.
    """
    X = check_cloud(cloud, min_samples=2, name="cloud")
    n, d = X.shape
    spread = float(np.mean(np.std(X, axis=0, ddof=1)))
    return spread * (4.0 / ((d + 2) * n)) ** (1.0 / (d + 4))


def default_algebra_scale(ell, n):
    """Silverman-shaped step size for coefficients in a normalized algebra basis."""
    return (4.0 / ((ell + 2) * n)) ** (1.0 / (ell + 4))


def kde(cloud, cfg):
    """Gaussian KDE draws ``x_t + h g`` with the Silverman bandwidth ``h``."""
    X = check_cloud(cloud, min_samples=2, name="cloud")
    n, d = X.shape
    h = silverman_bandwidth(X)
    Y = np.empty((cfg.N, d))
    source = np.empty(cfg.N, dtype=np.int64)
    for s in range(cfg.N):
        rng = _draw_rng(cfg.seed, s)
        t = rng.integers(n)
        Y[s] = X[t] + h * rng.standard_normal(d)
        source[s] = t
    return _plain_set(Y, source, "KDE", {"bandwidth": h})


def rejection_radius(cloud, k, factor=2.0):
    """``factor`` times the median distance from a point to its k-th neighbour."""
    X = check_cloud(cloud, min_samples=2, name="cloud")
    n = X.shape[0]
    if int(k) != k or not 1 <= k <= n - 1:
        raise PreconditionError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    D = pairwise_sq_distances(X)
    np.fill_diagonal(D, np.inf)
    kth = np.sqrt(np.sort(D, axis=1)[:, int(k) - 1])
    return float(factor * np.median(kth))


def _rejection_sample(X, cfg, propose, method, info):
    """Run ``propose(rng, t)`` per draw until the result lands within the radius."""
    n, d = X.shape
    radius = rejection_radius(X, min(cfg.k, n - 1), cfg.rejection_factor)
    Y = np.empty((cfg.N, d))
    source = np.empty(cfg.N, dtype=np.int64)
    retries = np.zeros(cfg.N, dtype=np.int64)
    fallback = np.zeros(cfg.N, dtype=bool)
    for s in range(cfg.N):
        rng = _draw_rng(cfg.seed, s)
        for attempt in range(cfg.max_retries + 1):
            t = rng.integers(n)
            y = propose(rng, t)
            diff = X - y
            if np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))) <= radius:
                break
        else:
            fallback[s] = True
        Y[s], source[s], retries[s] = y, t, attempt
    info = dict(info, rejection_radius=radius)
    return SampleSet(Y, source, retries, fallback, method, info)


def _frame_bases(frames):
    return [f.basis if isinstance(f, TangentFrame) else np.asarray(f, dtype=np.float64)
            for f in frames]


def lpca_sampler(cloud, frames, cfg):
    """Draws ``x_t + g`` with ``g`` Gaussian (std ``h`` per direction) in ``T_t``."""
    X = check_cloud(cloud, min_samples=2, name="cloud")
    bases = _frame_bases(frames)
    if len(bases) != X.shape[0]:
        raise PreconditionError(f"got {len(bases)} tangent frames for {X.shape[0]} points")
    h = silverman_bandwidth(X)

    def propose(rng, t):
        B = bases[t]
        return X[t] + B @ (h * rng.standard_normal(B.shape[1]))

    return _rejection_sample(X, cfg, propose, "LPCA", {"bandwidth": h})


def liepca_sampler(cloud, estimate, cfg):
    """Draws ``exp(A) x_t`` with ``A`` a Gaussian element of the estimated algebra."""
    X = check_cloud(cloud, min_samples=2, name="cloud")
    if not isinstance(estimate, LieAlgebraEstimate):
        estimate = LieAlgebraEstimate.from_matrices(estimate)
    if estimate.d != X.shape[1]:
        raise PreconditionError(
            f"algebra acts on R^{estimate.d} but the cloud lives in R^{X.shape[1]}")
    scale = cfg.algebra_scale
    if scale is None:
        scale = default_algebra_scale(estimate.ell, X.shape[0])
    basis = estimate.basis

    def propose(rng, t):
        g = rng.standard_normal(basis.shape[0])
        A = scale * np.tensordot(g, basis, axes=1)
        return mat_exp(A) @ X[t]

    return _rejection_sample(X, cfg, propose, "LIEPCA", {"algebra_scale": scale})


def simulate(cfg, cloud=None, manifold=None, frames=None, estimate=None):
    """Dispatch on ``cfg.method``, computing tangent frames or the algebra if needed."""
    if cfg.method == "BL2":
        return bl2(manifold, cfg)
    X = check_cloud(cloud, name="cloud")
    if cfg.method == "BL1":
        return bl1(X, cfg)
    if cfg.method == "KDE":
        return kde(X, cfg)
    needs_frames = cfg.method == "LPCA" or estimate is None
    if needs_frames and frames is None:
        frames = local_pca(X, cfg.k, cfg.r)
    if cfg.method == "LPCA":
        return lpca_sampler(X, frames, cfg)
    if estimate is None:
        estimate = estimate_lie_algebra(build_sigma(X, frames), cfg.ell)
    return liepca_sampler(X, estimate, cfg)


class DensitySampler(BaseEstimator):
    """Fit one of the density estimators and draw simulated samples from it.

    Parameters
    ----------
    method : {"BL1", "BL2", "KDE", "LPCA", "LIEPCA"}, default="LIEPCA"
    n_neighbors : int, default=2
        Local PCA neighbourhood size; also the neighbour rank of the
        rejection radius.
    intrinsic_dim : int, default=1
    algebra_dim : int, default=1
    algebra_scale : float or None, default=None
    rejection_factor : float, default=2.0
    max_retries : int, default=100
    manifold : AnalyticManifold or None, default=None
        Required by BL2, ignored otherwise.
    noise_sigma : float or None, default=None
        Noise added to BL2 draws.

    Examples
    --------
    >>> from liepca.manifolds import circle
    >>> X = circle().sample(30, seed=0)
    >>> Y = DensitySampler("LIEPCA").fit(X).sample(100, random_state=1)
    >>> Y.points.shape
    (100, 2)
    """

    def __init__(self, method="LIEPCA", n_neighbors=2, intrinsic_dim=1, algebra_dim=1,
                 algebra_scale=None, rejection_factor=2.0, max_retries=100,
                 manifold=None, noise_sigma=None):
        self.method = method
        self.n_neighbors = n_neighbors
        self.intrinsic_dim = intrinsic_dim
        self.algebra_dim = algebra_dim
        self.algebra_scale = algebra_scale
        self.rejection_factor = rejection_factor
        self.max_retries = max_retries
        self.manifold = manifold
        self.noise_sigma = noise_sigma

    def _config(self, n_samples, seed):
        return EstimatorConfig(self.method, getattr(self, "n_samples_fit_", 0), n_samples,
                               self.n_neighbors, self.intrinsic_dim, self.algebra_dim,
                               self.algebra_scale, self.rejection_factor, self.max_retries,
                               seed, self.noise_sigma)

    def fit(self, X=None, y=None):
        method = str(self.method).upper()
        self._config(1, 0)
        if method == "BL2":
            if self.manifold is None:
                raise PreconditionError("BL2 needs the manifold parameter")
            self.n_features_in_ = self.manifold.ambient_dim
            self.n_samples_fit_ = 0
            return self
        X = check_cloud(X, min_samples=1 if method == "BL1" else 2)
        self.X_fit_ = X
        self.n_samples_fit_, self.n_features_in_ = X.shape
        self.frames_ = self.estimate_ = None
        if method in ("LPCA", "LIEPCA"):
            self.frames_ = local_pca(X, self.n_neighbors, self.intrinsic_dim)
        if method == "LIEPCA":
            self.estimate_ = estimate_lie_algebra(build_sigma(X, self.frames_), self.algebra_dim)
        return self

    def sample(self, n_samples=1, random_state=0):
        """Draw ``n_samples`` points; ``random_state`` is an integer seed."""
        if not hasattr(self, "n_features_in_"):
            raise PreconditionError("call fit before sample")
        cfg = self._config(n_samples, random_state)
        return simulate(cfg, getattr(self, "X_fit_", None), self.manifold,
                        getattr(self, "frames_", None), getattr(self, "estimate_", None))
