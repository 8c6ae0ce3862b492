"""Density estimation benchmark over a grid of manifolds and methods."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .density import METHODS, EstimatorConfig, default_noise_sigma, simulate
from .exceptions import LiePCAError, PreconditionError
from .lie_pca import DegenerateSpectrumWarning, build_sigma, estimate_lie_algebra
from .manifolds import AnalyticManifold, ellipse, hyperbola, line, torus
from .metrics import hausdorff, nemd
from .tangent import local_pca

FRESH_SEED_OFFSET = 2_000_006
RESULTS_HEADER = ("manifold", "method", "nemd_median", "nemd_iqr",
                  "hausdorff_median", "hausdorff_iqr", "trials")
TABLE_METHODS = ("BL1", "KDE", "LPCA", "LIEPCA", "BL2")


@dataclass
class ManifoldScenario:
    """One row of the benchmark: a manifold, its sample sizes and noise level."""

    name: str
    manifold: AnalyticManifold
    n: int
    N: int
    k: int
    r: int
    ell: int
    noise_sigma: float = 0.0

    def config(self, method, seed, algebra_scale=None, rejection_factor=2.0,
               max_retries=100):
        return EstimatorConfig(method, self.n, self.N, self.k, self.r, self.ell,
                               algebra_scale, rejection_factor, max_retries, seed,
                               self.noise_sigma)

    def to_dict(self):
        return {"name": self.name, "manifold": self.manifold.to_dict(), "n": self.n,
                "N": self.N, "k": self.k, "r": self.r, "ell": self.ell,
                "noise_sigma": self.noise_sigma}

    @classmethod
    def from_dict(cls, data):
        try:
            M = AnalyticManifold.from_dict(data["manifold"])
            noise = data.get("noise_sigma", 0.0)
            if noise == "default":
                noise = default_noise_sigma(M)
            return cls(str(data["name"]), M, int(data["n"]), int(data["N"]), int(data["k"]),
                       int(data["r"]), int(data["ell"]), float(noise))
        except KeyError as exc:
            raise PreconditionError(f"scenario is missing field {exc}") from None


@dataclass
class ExperimentSpec:
    scenarios: list
    methods: tuple = TABLE_METHODS
    trials: int = 20
    seed_base: int = 0
    algebra_scale: float = None
    rejection_factor: float = 2.0
    max_retries: int = 100

    def __post_init__(self):
        if self.trials < 1:
            raise PreconditionError("trials must be at least 1")
        for m in self.methods:
            if m not in METHODS:
                raise PreconditionError(f"unknown method {m!r}")

    def to_dict(self):
        return {"scenarios": [s.to_dict() for s in self.scenarios],
                "methods": list(self.methods), "trials": self.trials,
                "seed_base": self.seed_base, "algebra_scale": self.algebra_scale,
                "rejection_factor": self.rejection_factor, "max_retries": self.max_retries}

    @classmethod
    def from_dict(cls, data):
        if "scenarios" not in data:
            raise PreconditionError("experiment spec needs a 'scenarios' list")
        methods = tuple(str(m).upper() for m in data.get("methods", TABLE_METHODS))
        return cls([ManifoldScenario.from_dict(s) for s in data["scenarios"]], methods,
                   int(data.get("trials", 20)), int(data.get("seed_base", 0)),
                   data.get("algebra_scale"), float(data.get("rejection_factor", 2.0)),
                   int(data.get("max_retries", 100)))


def default_scenarios():
    """Line, ellipse, hyperbola, noisy ellipse and torus at the benchmark sizes."""
    E = ellipse(2.0, 1.0)
    return [
        ManifoldScenario("line", line(), 30, 300, 2, 1, 1),
        ManifoldScenario("ellipse", E, 30, 300, 2, 1, 1),
        ManifoldScenario("hyperbola", hyperbola(), 30, 300, 2, 1, 1),
        ManifoldScenario("ellipse+noise", E, 60, 300, 10, 1, 1, default_noise_sigma(E)),
        ManifoldScenario("torus", torus(), 60, 300, 20, 2, 1),
    ]


def default_spec(trials=20, seed_base=0):
    return ExperimentSpec(default_scenarios(), TABLE_METHODS, trials, seed_base)


@dataclass
class TrialDraws:
    """Given data, simulated draws per method and the fresh reference draw."""

    data: np.ndarray
    fresh: np.ndarray
    simulated: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)


def run_trial(scenario, methods, seed, algebra_scale=None, rejection_factor=2.0,
              max_retries=100):
    """Simulate every method once from the data drawn with ``seed``.

    Local PCA and the Lie algebra are fitted once and shared by LPCA and
    LIEPCA. A failing method is recorded in ``errors`` instead of raising.
    """
    M = scenario.manifold
    X = M.sample(scenario.n, seed, scenario.noise_sigma)
    Z = M.sample(scenario.N, seed + FRESH_SEED_OFFSET, scenario.noise_sigma)
    out = TrialDraws(X, Z)
    frames = estimate = None
    for method in methods:
        cfg = scenario.config(method, seed, algebra_scale, rejection_factor, max_retries)
        try:
            if method in ("LPCA", "LIEPCA") and frames is None:
                frames = local_pca(X, scenario.k, scenario.r)
            if method == "LIEPCA" and estimate is None:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateSpectrumWarning)
                    estimate = estimate_lie_algebra(build_sigma(X, frames), scenario.ell)
            out.simulated[method] = simulate(cfg, X, M, frames, estimate).points
        except (LiePCAError, ValueError, np.linalg.LinAlgError) as exc:
            out.errors[method] = str(exc)
    return out


@dataclass
class ResultRow:
    manifold: str
    method: str
    nemd_median: float
    nemd_iqr: float
    hausdorff_median: float
    hausdorff_iqr: float
    trials: int

    def as_tuple(self):
        return (self.manifold, self.method, self.nemd_median, self.nemd_iqr,
                self.hausdorff_median, self.hausdorff_iqr, self.trials)


@dataclass
class ResultsTable:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def get(self, manifold, method):
        for row in self.rows:
            if row.manifold == manifold and row.method == method:
                return row
        raise KeyError((manifold, method))

    @property
    def partial(self):
        return bool(self.failures)


def _median_iqr(values):
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0 or np.any(np.isnan(v)):
        return float("nan"), float("nan")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return float(med), float(q3 - q1)


def run_experiment(spec, on_trial=None):
    """Run every (scenario, method) cell over ``spec.trials`` seeds.

    A cell in which any trial fails gets NaN statistics and is listed in
    ``failures``; the remaining cells still run. ``on_trial(name, trial,
    draws)`` is called after each trial, e.g. to plot the first one.
    """
    table = ResultsTable()
    for scenario in spec.scenarios:
        scores = {m: ([], []) for m in spec.methods}
        failed = {}
        for trial in range(spec.trials):
            seed = spec.seed_base + trial
            draws = run_trial(scenario, spec.methods, seed, spec.algebra_scale,
                              spec.rejection_factor, spec.max_retries)
            if on_trial is not None:
                on_trial(scenario.name, trial, draws)
            for method in spec.methods:
                if method in draws.errors:
                    failed.setdefault(method, draws.errors[method])
                    continue
                Y = draws.simulated[method]
                scores[method][0].append(nemd(Y, draws.fresh))
                scores[method][1].append(hausdorff(Y, draws.fresh))
        for method in spec.methods:
            if method in failed:
                table.failures.append((scenario.name, method, failed[method]))
                stats = (float("nan"),) * 4
            else:
                stats = _median_iqr(scores[method][0]) + _median_iqr(scores[method][1])
            table.rows.append(ResultRow(scenario.name, method, stats[0], stats[1],
                                        stats[2], stats[3], spec.trials))
    return table
