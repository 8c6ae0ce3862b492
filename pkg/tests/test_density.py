import numpy as np
import pytest
from sklearn.base import clone

from liepca.density import (BL2_SEED_OFFSET, DensitySampler, EstimatorConfig,
                            default_algebra_scale, bl1, bl2, kde, liepca_sampler,
                            lpca_sampler, rejection_radius, silverman_bandwidth, simulate)
from liepca.exceptions import PreconditionError
from liepca.lie_pca import LieAlgebraEstimate
from liepca.manifolds import circle, ellipse, torus
from liepca.tangent import local_pca

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def cfg(method, N=300, **kw):
    return EstimatorConfig(method, 30, N, kw.pop("k", 2), kw.pop("r", 1), kw.pop("ell", 1), **kw)


@pytest.fixture
def circle30():
    return circle().sample(30, 0)


class TestBL1:
    def test_single_point(self):
        Y = bl1([[1.5, -2.0]], cfg("BL1", N=20))
        assert np.all(Y.points == [1.5, -2.0])

    def test_subset_of_cloud(self, circle30):
        Y = bl1(circle30, cfg("BL1"))
        np.testing.assert_array_equal(Y.points, circle30[Y.source])

    def test_uniform_frequencies(self, circle30):
        counts = np.bincount(bl1(circle30, cfg("BL1", seed=4)).source, minlength=30)
        sd = np.sqrt(300 * (1 / 30) * (29 / 30))
        assert np.all(np.abs(counts - 10) <= 3 * sd)

    def test_empty_cloud(self):
        with pytest.raises(PreconditionError):
            bl1(np.zeros((0, 2)), cfg("BL1"))


class TestBL2:
    def test_circle_norms(self):
        Y = bl2(circle(), cfg("BL2"))
        np.testing.assert_allclose(np.linalg.norm(Y.points, axis=1), 1, atol=1e-12)

    def test_torus_on_manifold(self):
        M = torus()
        Y = bl2(M, cfg("BL2", seed=3))
        assert max(M.implicit_residual(y) for y in Y.points) <= 1e-10

    def test_shifted_seed(self):
        M = ellipse(2.0, 1.0)
        Y = bl2(M, cfg("BL2", seed=7, noise_sigma=0.1))
        np.testing.assert_array_equal(Y.points, M.sample(300, 7 + BL2_SEED_OFFSET, 0.1))


class TestSilverman:
    def test_two_points(self):
        assert silverman_bandwidth([[0.0, 0.0], [2.0, 0.0]]) == pytest.approx(0.6300, abs=1e-3)
        expected = np.sqrt(2) / 2 * 0.5 ** (1 / 6)
        assert silverman_bandwidth([[0.0, 0.0], [2.0, 0.0]]) == pytest.approx(expected, rel=1e-15)

    def test_identical_points(self):
        assert silverman_bandwidth(np.ones((5, 3))) == 0

    def test_homogeneous(self, circle30):
        assert silverman_bandwidth(3.5 * circle30) == pytest.approx(
            3.5 * silverman_bandwidth(circle30), rel=1e-14)

    def test_needs_two_points(self):
        with pytest.raises(PreconditionError):
            silverman_bandwidth([[1.0, 2.0]])


class TestKDE:
    def test_zero_bandwidth_is_bl1(self):
        X = np.tile([[0.5, 0.25]], (4, 1))
        a, b = kde(X, cfg("KDE", seed=2)), bl1(X, cfg("BL1", seed=2))
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.source, b.source)

    def test_tiny_cloud_approaches_bl1(self, circle30):
        X = 1e-9 * circle30 + np.array([3.0, -1.0])
        a, b = kde(X, cfg("KDE")), bl1(X, cfg("BL1"))
        np.testing.assert_array_equal(a.source, b.source)
        np.testing.assert_allclose(a.points, b.points, atol=1e-8)

    def test_unbiased_steps(self, circle30):
        N = 10_000
        Y = kde(circle30, cfg("KDE", N=N, seed=5))
        h = Y.info["bandwidth"]
        steps = Y.points - circle30[Y.source]
        assert np.all(np.abs(steps.mean(axis=0)) <= 3 * h / np.sqrt(N))

    def test_bit_exact_reproducible(self, circle30):
        a, b = kde(circle30, cfg("KDE", seed=9)), kde(circle30, cfg("KDE", seed=9))
        assert a.points.tobytes() == b.points.tobytes()


class TestRejectionRadius:
    def test_equal_spacing(self):
        X = np.arange(10.0)[:, None] * 0.3
        assert rejection_radius(X, 1, 2.0) == pytest.approx(0.6)

    def test_homogeneous(self, circle30):
        assert rejection_radius(4 * circle30, 3) == pytest.approx(4 * rejection_radius(circle30, 3))

    def test_brute_force_oracle(self, rng):
        X = rng.standard_normal((25, 3))
        kth = []
        for i in range(25):
            d = sorted(np.linalg.norm(X[i] - X[j]) for j in range(25) if j != i)
            kth.append(d[3])
        assert rejection_radius(X, 4, 1.5) == pytest.approx(1.5 * np.median(kth), rel=1e-14)

    @pytest.mark.parametrize("k", [0, 30])
    def test_range(self, circle30, k):
        with pytest.raises(PreconditionError):
            rejection_radius(circle30, k)


def unrejected_lpca(X, frames, seed, N):
    h = silverman_bandwidth(X)
    out = []
    for s in range(N):
        rng = np.random.default_rng([seed, s])
        t = rng.integers(len(X))
        B = frames[t].basis
        out.append(X[t] + B @ (h * rng.standard_normal(B.shape[1])))
    return np.array(out)


class TestLPCA:
    def test_flat_line_stays_on_line(self):
        X = np.zeros((20, 2))
        X[:, 0] = np.linspace(-1, 1, 20)
        Y = lpca_sampler(X, local_pca(X, 2, 1), cfg("LPCA"))
        assert np.all(np.abs(Y.points[:, 1]) <= 1e-12)

    def test_rejection_radius_respected(self, circle30):
        Y = lpca_sampler(circle30, local_pca(circle30, 2, 1), cfg("LPCA"))
        rho = Y.info["rejection_radius"]
        for y, fell_back in zip(Y.points, Y.fallback):
            assert fell_back or np.min(np.linalg.norm(circle30 - y, axis=1)) <= rho

    def test_no_retries_equals_unrejected(self, circle30):
        frames = local_pca(circle30, 2, 1)
        Y = lpca_sampler(circle30, frames, cfg("LPCA", max_retries=0, seed=3))
        np.testing.assert_array_equal(Y.points, unrejected_lpca(circle30, frames, 3, 300))


class TestLiePCASampler:
    def test_zero_scale_is_bl1(self, circle30):
        est = LieAlgebraEstimate.from_matrices(J)
        a = liepca_sampler(circle30, est, cfg("LIEPCA", algebra_scale=0.0, seed=8))
        b = bl1(circle30, cfg("BL1", seed=8))
        np.testing.assert_array_equal(a.points, b.points)

    def test_exact_algebra_preserves_norm(self, circle30):
        est = LieAlgebraEstimate.from_matrices(J)
        Y = liepca_sampler(circle30, est, cfg("LIEPCA"))
        np.testing.assert_allclose(np.linalg.norm(Y.points, axis=1), 1, atol=1e-8)

    def test_small_scale_linearization(self, rng):
        X = rng.standard_normal((30, 3))
        basis = np.linalg.qr(rng.standard_normal((9, 2)))[0]
        est = LieAlgebraEstimate.from_matrices([b.reshape(3, 3) for b in basis.T])
        sigma = 1e-3
        Y = liepca_sampler(X, est, cfg("LIEPCA", ell=2, algebra_scale=sigma, seed=1,
                                       rejection_factor=100.0))
        linear = []
        for s in range(300):
            g_rng = np.random.default_rng([1, s])
            t = g_rng.integers(30)
            A = sigma * np.tensordot(g_rng.standard_normal(2), est.basis, axes=1)
            linear.append(np.linalg.norm(A @ X[t]))
        moved = np.median(np.linalg.norm(Y.points - X[Y.source], axis=1))
        assert abs(moved / np.median(linear) - 1) <= 0.05

    def test_default_scale(self, circle30):
        Y = liepca_sampler(circle30, LieAlgebraEstimate.from_matrices(J), cfg("LIEPCA"))
        assert Y.info["algebra_scale"] == pytest.approx((4 / (3 * 30)) ** (1 / 5))
        assert default_algebra_scale(1, 30) == Y.info["algebra_scale"]

    def test_dimension_mismatch(self, circle30):
        with pytest.raises(PreconditionError):
            liepca_sampler(circle30, LieAlgebraEstimate.from_matrices(np.eye(3)), cfg("LIEPCA"))


@pytest.mark.parametrize("method", ["BL1", "KDE", "LPCA", "LIEPCA"])
def test_deterministic(circle30, method):
    a = simulate(cfg(method, seed=12), circle30)
    b = simulate(cfg(method, seed=12), circle30)
    assert a.points.tobytes() == b.points.tobytes()
    assert np.array_equal(a.retries, b.retries)


@pytest.mark.parametrize("method", ["LPCA", "LIEPCA"])
def test_rejection_soundness(method):
    X = ellipse(2.0, 1.0).sample(30, 2)
    Y = simulate(cfg(method, max_retries=3), X)
    rho = Y.info["rejection_radius"]
    near = np.array([np.min(np.linalg.norm(X - y, axis=1)) <= rho for y in Y.points])
    assert np.all(near | Y.fallback)
    assert np.all(Y.retries[Y.fallback] == 3)


@pytest.mark.parametrize("method", ["KDE", "LPCA"])
def test_mean_is_preserved(circle30, method):
    N = 3000
    Y = simulate(cfg(method, N=N, seed=6), circle30).points
    spread = Y.std(axis=0, ddof=1)
    assert np.all(np.abs(Y.mean(axis=0) - circle30.mean(axis=0)) <= 3 * spread / np.sqrt(N))


def test_draws_do_not_depend_on_batch_size(circle30):
    small = simulate(cfg("LIEPCA", N=50, seed=2), circle30)
    large = simulate(cfg("LIEPCA", N=300, seed=2), circle30)
    np.testing.assert_array_equal(small.points, large.points[:50])


def test_config_validation():
    with pytest.raises(PreconditionError):
        EstimatorConfig("FOO")
    with pytest.raises(PreconditionError):
        EstimatorConfig("BL1", N=0)
    with pytest.raises(PreconditionError):
        EstimatorConfig("BL1", rejection_factor=0)


def test_sampler_estimator(circle30):
    model = DensitySampler("liepca").fit(circle30)
    Y = model.sample(120, random_state=3)
    assert len(Y) == 120 and Y.method == "LIEPCA"
    assert np.all(np.abs(np.linalg.norm(Y.points, axis=1) - 1) <= 0.1)
    assert clone(model).get_params() == model.get_params()
    with pytest.raises(PreconditionError):
        DensitySampler("BL2").fit(circle30)
    ref = DensitySampler("BL2", manifold=circle()).fit().sample(10, 1)
    assert ref.points.shape == (10, 2)
    with pytest.raises(PreconditionError):
        DensitySampler("KDE").sample(3)
