"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 a sample point at the origin,
4 unsupported manifold, 5 partial failure (failed trials or benchmark cells).
"""

import argparse
import json
import os
import sys
import warnings

from . import io
from .complexity import verify_cone_d2_failure, verify_threshold
from .density import EstimatorConfig, METHODS, simulate
from .exceptions import OriginPointError, PreconditionError, UnsupportedManifoldError
from .experiment import RESULTS_HEADER, ExperimentSpec, default_spec, run_experiment
from .lie_pca import DegenerateSpectrumWarning, LiePCA
from .manifolds import AnalyticManifold, circle, cone, ellipse, hyperbola, line, torus
from .metrics import hausdorff, nemd
from .svg import write_scatter_panels

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ORIGIN = 3
EXIT_UNSUPPORTED = 4
EXIT_PARTIAL = 5

PRESETS = {
    "line": line,
    "circle": circle,
    "ellipse": lambda: ellipse(2.0, 1.0),
    "hyperbola": hyperbola,
    "torus": torus,
    "planar-cone": lambda: cone(1, 1),
}


def load_manifold(text):
    """A manifold from a preset name, an inline JSON object or a JSON file."""
    if text in PRESETS:
        return PRESETS[text]()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise io.InputFormatError(f"invalid manifold JSON: {exc.msg}") from None
    else:
        data = io.read_json(text)
    return AnalyticManifold.from_dict(data)


def _write_sidecar(out, payload):
    io.write_json(out + ".json", payload)


def cmd_estimate(args):
    X = io.read_cloud(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateSpectrumWarning)
        est = LiePCA(args.k, args.r, args.ell).fit(X).estimate_
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    payload = est.to_dict()
    payload.update(n=X.shape[0], k=args.k, r=args.r)
    io.write_json(args.out, payload)
    return EXIT_OK


def cmd_density(args):
    cfg = EstimatorConfig(args.method, 0, args.N, args.k, args.r, args.ell, args.sigma_a,
                          args.rejection_factor, args.max_retries, args.seed, args.noise)
    manifold = X = None
    if cfg.method == "BL2":
        if args.manifold is None:
            raise PreconditionError("BL2 needs --manifold")
        manifold = load_manifold(args.manifold)
    else:
        if args.input is None:
            raise PreconditionError(f"{cfg.method} needs --input")
        X = io.read_cloud(args.input)
        cfg.n = X.shape[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrumWarning)
        result = simulate(cfg, X, manifold)
    io.write_cloud(args.out, result.points)
    _write_sidecar(args.out, {"config": cfg.to_dict(), "info": result.info,
                              "source": result.source, "retries": result.retries,
                              "fallback": result.fallback})
    return EXIT_OK


def cmd_evaluate(args):
    Y = io.read_cloud(args.input)
    Z = io.read_cloud(args.fresh)
    io.write_json(args.out, {"nemd": nemd(Y, Z), "hausdorff": hausdorff(Y, Z)})
    return EXIT_OK


def _print_report(report):
    print(f"n_star={report.n_star} sym_dim={report.sym_dim} trials={report.trials}")
    print("trial  seed  n  kernel  expected  relation  result")
    for r in report.records:
        verdict = "inconclusive" if r.inconclusive else ("pass" if r.passed else "FAIL")
        print(f"{r.trial:5d} {r.seed:5d} {r.n:2d} {r.kernel_dim:7d} {r.expected_kernel_dim:9d}"
              f"  {r.relation + (' ' + r.branch if r.branch else ''):8s}  {verdict}")
    print(f"conclusion: {report.conclusion}")


def cmd_complexity(args):
    M = load_manifold(args.manifold)
    seeds = range(args.seed, args.seed + args.trials)
    if M.kind == "Cone" and M.ambient_dim == 2:
        report = verify_cone_d2_failure(args.trials, seeds)
    else:
        report = verify_threshold(M, args.trials, seeds)
    if args.out:
        io.write_json(args.out, report.to_dict())
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_PARTIAL


def _plot_first_trial(svg_dir, scenarios):
    os.makedirs(svg_dir, exist_ok=True)
    by_name = {s.name: s for s in scenarios}

    def on_trial(name, trial, draws):
        if trial != 0:
            return
        panels = [draws.data] + [draws.simulated.get(m) for m in ("KDE", "LPCA", "LIEPCA")]
        panels.append(draws.fresh)
        d = by_name[name].manifold.ambient_dim
        projections = [(0, 1), (0, 2)] if d == 3 else [(0, 1)]
        fname = "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
        write_scatter_panels(os.path.join(svg_dir, f"{fname}.svg"), panels,
                             projections=projections)

    return on_trial


def cmd_table1(args):
    spec = ExperimentSpec.from_dict(io.read_json(args.spec)) if args.spec else default_spec()
    if args.trials is not None:
        spec.trials = args.trials
    if args.seed is not None:
        spec.seed_base = args.seed
    if args.sigma_a is not None:
        spec.algebra_scale = args.sigma_a
    if args.rejection_factor is not None:
        spec.rejection_factor = args.rejection_factor
    if spec.trials < 1:
        raise PreconditionError("trials must be at least 1")
    on_trial = _plot_first_trial(args.svg_dir, spec.scenarios) if args.svg_dir else None
    table = run_experiment(spec, on_trial)
    io.write_results_csv(args.out, RESULTS_HEADER, [r.as_tuple() for r in table.rows])
    for manifold, method, message in table.failures:
        print(f"cell {manifold}/{method} failed: {message}", file=sys.stderr)
    return EXIT_PARTIAL if table.partial else EXIT_OK


def cmd_sample(args):
    M = load_manifold(args.manifold)
    io.write_cloud(args.out, M.sample(args.n, args.seed, args.noise or 0.0))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="liepca", description=(
        "Estimate symmetry Lie algebras of point clouds and use them for density estimation."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Lie algebra estimate of a CSV point cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, default=2, help="local PCA neighbours")
    p.add_argument("--r", type=int, default=1, help="manifold dimension")
    p.add_argument("--ell", type=int, default=1, help="Lie algebra dimension")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("density", help="simulate draws with one density estimator")
    p.add_argument("--input")
    p.add_argument("--manifold", help="BL2 only: preset name, JSON text or JSON file")
    p.add_argument("--method", required=True, type=str.upper, choices=METHODS)
    p.add_argument("--N", type=int, default=300)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--sigma-a", type=float, default=None)
    p.add_argument("--rejection-factor", type=float, default=2.0)
    p.add_argument("--max-retries", type=int, default=100)
    p.add_argument("--noise", type=float, default=None, help="BL2 noise std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("evaluate", help="nEMD and Hausdorff distance between two CSV clouds")
    p.add_argument("--input", required=True, help="simulated draws")
    p.add_argument("--fresh", required=True, help="reference draws")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("complexity", help="check the sample-complexity threshold")
    p.add_argument("--manifold", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="first trial seed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("table1", help="benchmark all density estimators")
    p.add_argument("--spec", help="experiment JSON; defaults to the built-in grid")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="seed of the first trial")
    p.add_argument("--sigma-a", type=float, default=None)
    p.add_argument("--rejection-factor", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--svg-dir")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sample", help="draw points from a manifold")
    p.add_argument("--manifold", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OriginPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORIGIN
    except UnsupportedManifoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (PreconditionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
