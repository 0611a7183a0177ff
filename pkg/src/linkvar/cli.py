"""Command-line entry point.

Subcommands: generate, fit, predict, tune, evaluate, sweep, diagnose.
Informational output goes to stderr; machine-readable output goes only
to files. Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .baselines import cumulative
from .config import parse_experiment_config
from .data import load_sequence, save_dataset
from .errors import LinkvarError
from .features import svd_feature_map
from .generator import generate
from .metrics import auc  # noqa: F401  (re-exported for scripting convenience)
from .mmio import read_matrix, write_matrix
from .objective import build_problem_data
from .solver import SolverConfig, gfb_minimize
from .tuning import concentration_check, cross_validate, estimate_sigma, theorem3_params

log = logging.getLogger("linkvar")


def _add_common(parser, config_required=True):
    parser.add_argument("--config", required=config_required, help="experiment config JSON")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="K=V",
        help="dotted-key config override, repeatable (e.g. penalties.tau=0)",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging to stderr")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="linkvar",
        description="Temporal link prediction with jointly estimated VAR feature dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset directory")
    _add_common(p)
    p.add_argument("--out", required=True, help="dataset output directory")

    p = sub.add_parser("fit", help="fit the joint estimator on a dataset")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="fit output directory")
    p.add_argument("--trace", action="store_true", help="dump per-iteration trace.csv")

    p = sub.add_parser("predict", help="emit link scores from a fit directory")
    _add_common(p, config_required=False)
    p.add_argument("--fit", required=True, help="fit directory holding A_hat.mtx")
    p.add_argument("--out", required=True, help="output scores .mtx path")

    p = sub.add_parser("tune", help="choose penalties for a dataset")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output directory for penalties.json")
    p.add_argument(
        "--method",
        default="autoregressive-sparse-low-rank",
        help="method tuned when the policy is cv",
    )

    p = sub.add_parser("evaluate", help="run the AUC benchmark")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory for result CSVs")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    p.add_argument("--timings", action="store_true", help="also write timings.csv")

    p = sub.add_parser("sweep", help="factorial sweep over horizons and ranks")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory for sweep CSVs")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker count")

    p = sub.add_parser("diagnose", help="Monte-Carlo concentration diagnostics")
    _add_common(p)
    p.add_argument("--data", default=None, help="dataset directory (generated when absent)")
    p.add_argument("--out", required=True, help="output concentration.csv path")
    return parser


def _load_spec(args):
    overrides = list(args.override)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return parse_experiment_config(args.config, overrides)


def _solver_config(spec, trace_path=None):
    return SolverConfig(
        theta_scale=spec.theta_scale,
        max_iter=spec.max_iter,
        tol=spec.tol,
        enforce_nonneg=spec.enforce_nonneg,
        trace_path=trace_path,
    )


def _sigma_for_tuning(spec, data):
    if spec.sigma > 0:
        return spec.sigma
    estimated = estimate_sigma(data)
    log.info("sigma=0 in config; using estimated noise level %.6g", estimated)
    return estimated


def _tuned_penalties(spec, seq, cfg, method):
    feature_rank = spec.effective_feature_rank
    if spec.tuning_policy == "fixed":
        return spec.penalties, None
    if spec.tuning_policy == "theorem3":
        fmap = svd_feature_map(cumulative(seq), feature_rank)
        data = build_problem_data(fmap, seq)
        sigma = _sigma_for_tuning(spec, data)
        return theorem3_params(fmap, seq, sigma, spec.alpha, spec.confidence_x), None
    result = cross_validate(
        seq,
        method,
        spec.grid,
        folds=spec.cv_folds,
        seed=spec.fold_seed(0),
        cfg=cfg,
        feature_rank=feature_rank,
        binarize_threshold=spec.binarize_threshold,
    )
    return result.best, result


def _cmd_generate(args):
    spec = _load_spec(args)
    dataset = generate(spec.generator_params(0))
    save_dataset(dataset, args.out)
    log.info(
        "wrote %d snapshots (n=%d) to %s; clamped fraction %.4f",
        len(dataset.sequence),
        dataset.sequence.n,
        args.out,
        dataset.clamped_fraction,
    )
    return 0


def _cmd_fit(args):
    spec = _load_spec(args)
    seq = load_sequence(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _solver_config(spec, trace_path=str(out / "trace.csv") if args.trace else None)
    pen, _ = _tuned_penalties(spec, seq, cfg, args_method(args))
    fmap = svd_feature_map(cumulative(seq), spec.effective_feature_rank)
    data = build_problem_data(fmap, seq)
    fit = gfb_minimize(data, pen, cfg)
    write_matrix(fit.A_hat, out / "A_hat.mtx")
    write_matrix(fit.W_hat, out / "W_hat.mtx")
    with open(out / "fit.json", "w", encoding="ascii") as fh:
        json.dump(
            {
                "iterations": fit.iterations,
                "converged": fit.converged,
                "final_residual": fit.final_residual,
                "theta": fit.theta,
                "lipschitz_bound": fit.lipschitz_bound,
                "objective_first": fit.objective[0],
                "objective_last": fit.objective[-1],
                "penalties": {"tau": pen.tau, "gamma": pen.gamma, "kappa": pen.kappa},
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    log.info(
        "fit converged=%s in %d iterations, residual %.3e", fit.converged, fit.iterations,
        fit.final_residual,
    )
    return 0


def args_method(args):
    return getattr(args, "method", "autoregressive-sparse-low-rank")


def _cmd_predict(args):
    scores = read_matrix(Path(args.fit) / "A_hat.mtx")
    write_matrix(scores, args.out)
    log.info("wrote %dx%d score matrix to %s", scores.shape[0], scores.shape[1], args.out)
    return 0


def _cmd_tune(args):
    spec = _load_spec(args)
    seq = load_sequence(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _solver_config(spec)
    pen, cv_result = _tuned_penalties(spec, seq, cfg, args.method)
    with open(out / "penalties.json", "w", encoding="ascii") as fh:
        json.dump(
            {
                "policy": spec.tuning_policy,
                "tau": pen.tau,
                "gamma": pen.gamma,
                "kappa": pen.kappa,
                "alpha": pen.alpha,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    if cv_result is not None:
        bench.write_cv_table_csv(out / "cv_table.csv", cv_result.table)
    log.info("tuned penalties tau=%.6g gamma=%.6g kappa=%.6g", pen.tau, pen.gamma, pen.kappa)
    return 0


def _cmd_evaluate(args):
    spec = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results, failures = bench.run_experiment(spec, jobs=args.jobs)
    bench.write_results_csv(out / "results.csv", results)
    bench.write_summary_csv(out / "summary.csv", bench.aggregate(results))
    if failures:
        bench.write_failures_csv(out / "failures.csv", failures)
        log.warning("%d run(s) failed; see failures.csv", len(failures))
    if args.timings:
        bench.write_timings_csv(out / "timings.csv", results)
    log.info("wrote %d results to %s", len(results), out)
    return 0


def _cmd_sweep(args):
    spec = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    T_values = spec.sweep_T if spec.sweep_T is not None else (spec.T,)
    rank_values = spec.sweep_ranks if spec.sweep_ranks is not None else (spec.r,)
    grid = bench.sweep_phase(spec, T_values, rank_values, jobs=args.jobs)
    bench.write_summary_csv(out / "sweep.csv", grid.cells)
    bench.write_results_csv(out / "sweep_results.csv", grid.results)
    if grid.failures:
        bench.write_failures_csv(out / "failures.csv", grid.failures)
        log.warning("%d run(s) failed; see failures.csv", len(grid.failures))
    log.info("wrote %d cells to %s", len(grid.cells), out)
    return 0


def _cmd_diagnose(args):
    spec = _load_spec(args)
    if args.data is not None:
        seq = load_sequence(args.data)
    else:
        seq = generate(spec.generator_params(0)).sequence
    fmap = svd_feature_map(cumulative(seq), spec.effective_feature_rank)
    report = concentration_check(
        fmap,
        seq,
        spec.sigma,
        x=spec.confidence_x,
        trials=spec.trials,
        seed=spec.seed ^ (1 << 33),
    )
    bench.write_concentration_csv(args.out, report)
    for rec in report.records:
        log.info(
            "%s: rate %.4f vs cap %.4f (bound %.6g)", rec.name, rec.rate, rec.cap, rec.bound
        )
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "tune": _cmd_tune,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "diagnose": _cmd_diagnose,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1  # argparse uses 2 for usage errors
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (LinkvarError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


def run():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
