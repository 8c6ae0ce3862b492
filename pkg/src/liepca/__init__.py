"""Symmetry Lie algebra estimation from point clouds, and density estimation with it."""

from .complexity import (ComplexityReport, exact_kernel_dim, kernel_dim_at,
                         verify_cone_d2_failure, verify_threshold)
from .density import (DensitySampler, EstimatorConfig, SampleSet, bl1, bl2, kde,
                      liepca_sampler, lpca_sampler, rejection_radius, silverman_bandwidth)
from .exceptions import (LiePCAError, NotPSDError, OffManifoldError, OriginPointError,
                         PreconditionError, UnsupportedManifoldError)
from .lie_pca import (DegenerateSpectrumWarning, LieAlgebraEstimate, LiePCA, LiePcaOperator,
                      build_sigma, estimate_lie_algebra)
from .manifolds import AnalyticManifold, apply_gl
from .metrics import hausdorff, nemd
from .numerics import mat_exp, numerical_rank, projector, subspace_distance, sym_eig
from .tangent import LocalPCA, TangentFrame, knn, local_pca

__version__ = "0.1.0"

__all__ = [
    "AnalyticManifold", "ComplexityReport", "DegenerateSpectrumWarning", "DensitySampler",
    "EstimatorConfig", "LieAlgebraEstimate", "LiePCA", "LiePCAError", "LiePcaOperator",
    "LocalPCA", "NotPSDError", "OffManifoldError", "OriginPointError", "PreconditionError",
    "SampleSet", "TangentFrame", "UnsupportedManifoldError", "apply_gl", "bl1", "bl2",
    "build_sigma", "estimate_lie_algebra", "exact_kernel_dim", "hausdorff", "kde",
    "kernel_dim_at", "knn", "liepca_sampler", "local_pca", "lpca_sampler", "mat_exp",
    "nemd", "numerical_rank", "projector", "rejection_radius", "silverman_bandwidth",
    "subspace_distance", "sym_eig", "verify_cone_d2_failure", "verify_threshold",
]
