import json

import numpy as np
import pytest

from conftest import random_conditioned
from liepca.complexity import (exact_kernel_dim, kernel_dim_at, threshold_zoo,
                               verify_cone_d2_failure, verify_threshold)
from liepca.exceptions import UnsupportedManifoldError
from liepca.manifolds import (affine_subspace, apply_gl, circle, cone, ellipse, hyperboloid,
                              sphere, subspace, torus)
from liepca.complexity import _planar_cone_points, _rank_from_spectrum, _spectrum


def test_kernel_dim_examples():
    assert kernel_dim_at(subspace(2, 1), 1, 0) == 3
    assert kernel_dim_at(circle(), 2, 0) == 2
    assert kernel_dim_at(circle(), 3, 0) == 1


def test_threshold_examples():
    assert verify_threshold(affine_subspace(2, 1), trials=3).n_star == 2
    assert verify_threshold(sphere(3), trials=3).n_star == 6
    assert verify_threshold(cone(2, 1), trials=3).n_star == 5


def test_report_records_and_json():
    report = verify_threshold(circle(), trials=4)
    assert report.passed
    assert [r.n for r in report.records] == [2, 3] * 4
    for r in report.records:
        assert r.kernel_dim + r.rank == 4
    assert json.loads(json.dumps(report.to_dict()))["n_star"] == 3


def test_threshold_unsupported():
    with pytest.raises(UnsupportedManifoldError):
        verify_threshold(torus(), trials=1)
    with pytest.raises(UnsupportedManifoldError):
        verify_threshold(cone(1, 1), trials=1)


def test_planar_cone_single_branch_saturates():
    M = cone(1, 1)
    rng = np.random.default_rng(0)
    for n in (2, 20):
        X = _planar_cone_points(rng, n, "single")
        assert np.all(X[:, 0] == X[:, 1])
        rank, _ = _rank_from_spectrum(_spectrum(M, X), 1e-8)
        assert 4 - rank == 3


def test_planar_cone_mixed_branches_n5():
    M = cone(1, 1)
    rng = np.random.default_rng(1)
    X = _planar_cone_points(rng, 5, "mixed")
    assert np.any(X[:, 0] == -X[:, 1]) and np.any(X[:, 0] == X[:, 1])
    rank, _ = _rank_from_spectrum(_spectrum(M, X), 1e-8)
    assert 4 - rank == 2


def test_cone_d2_failure_report():
    report = verify_cone_d2_failure(trials=5)
    assert report.passed
    single = [r for r in report.records if r.branch == "single"]
    assert {r.n for r in single} == {2, 5, 20}
    assert all(r.kernel_dim == 3 for r in single)


ZOO = threshold_zoo() + [ellipse(2.0, 1.0), apply_gl(cone(2, 1), np.diag([1.0, 2.0, 0.5]))]


@pytest.mark.parametrize("M", ZOO, ids=repr)
def test_kernel_monotone_and_bounded_below(M):
    for seed in range(3):
        dims = [kernel_dim_at(M, n, seed) for n in range(1, M.n_star() + 2)]
        assert all(a >= b for a, b in zip(dims, dims[1:]))
        assert min(dims) >= M.sym_dim


@pytest.mark.parametrize("M", [m for m in threshold_zoo() if m.kind != "Subspace"], ids=repr)
def test_exact_rational_rank_at_threshold(M):
    """Every seed used by the acceptance run is generic when ranks are computed exactly."""
    ns = M.n_star()
    for seed in range(20):
        X = M.sample(ns, seed)
        assert exact_kernel_dim(M, X) == M.sym_dim
        assert exact_kernel_dim(M, X[:-1]) > M.sym_dim


def test_exact_rank_subspaces():
    for M in [m for m in threshold_zoo() if m.kind == "Subspace"]:
        X = M.sample(M.n_star(), 0)
        assert exact_kernel_dim(M, X) == M.sym_dim


def test_exact_rank_rejects_transformed_models():
    with pytest.raises(UnsupportedManifoldError):
        exact_kernel_dim(ellipse(2.0, 1.0), ellipse(2.0, 1.0).sample(3))


@pytest.mark.parametrize("M", [circle(), sphere(3), hyperboloid(2, 1), cone(2, 1),
                               affine_subspace(3, 1), subspace(3, 2)], ids=repr)
def test_gl_invariance_of_kernel_dimension(M):
    rng = np.random.default_rng(17)
    compared = total = 0
    for _ in range(10):
        Z = random_conditioned(rng, M.ambient_dim, 10.0)
        cond = np.linalg.cond(Z)
        ZM = apply_gl(M, Z)
        gap = 1e-6 / cond ** 2
        base = verify_threshold(M, trials=5, gap_ratio=gap)
        moved = verify_threshold(ZM, trials=5, gap_ratio=gap)
        assert moved.n_star == base.n_star
        for a, b in zip(base.records, moved.records):
            total += 1
            if a.inconclusive or b.inconclusive:
                continue
            compared += 1
            assert a.kernel_dim == b.kernel_dim
    assert compared >= 0.8 * total
