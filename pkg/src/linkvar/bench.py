"""Experiment orchestration: AUC benchmark runs, phase-transition
sweeps, and deterministic CSV emission.

Every run is a pure function of (spec, run index): dataset seeds derive
from the master seed, aggregation happens in sorted order, and result
CSVs exclude wall times, so output bytes are identical across repeated
invocations and across worker counts.
"""

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baselines import cumulative, score_method
from .errors import LinkvarError
from .features import svd_feature_map
from .generator import generate
from .metrics import auc
from .objective import Penalties
from .solver import SolverConfig
from .tuning import cross_validate, theorem3_params

SCHEMA_VERSION = 1

log = logging.getLogger("linkvar")


@dataclass(frozen=True)
class RunResult:
    """Outcome of one method on one generated dataset."""

    method: str
    seed: int
    T: int
    rank: int
    auc: float
    wall_time: float

    def __post_init__(self):
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"AUC must lie in [0, 1], got {self.auc}")


@dataclass(frozen=True)
class RunFailure:
    """A failed run, recorded instead of silently dropped."""

    method: str
    seed: int
    T: int
    rank: int
    message: str


@dataclass(frozen=True)
class SweepGrid:
    """Factorial sweep over horizons and ranks with per-cell aggregates."""

    T_values: tuple
    rank_values: tuple
    results: tuple
    cells: tuple  # aggregate rows: method, T, rank, mean_auc, ci_halfwidth, n_runs
    failures: tuple


def _solver_config(spec):
    return SolverConfig(
        theta_scale=spec.theta_scale,
        max_iter=spec.max_iter,
        tol=spec.tol,
        enforce_nonneg=spec.enforce_nonneg,
    )


def _resolve_penalties(spec, seq, feature_rank, run_index, cfg):
    """Tuning-policy dispatch; returns (shared penalties | None, per-method dict)."""
    if spec.tuning_policy == "fixed":
        return spec.penalties, {}
    if spec.tuning_policy == "theorem3":
        if spec.sigma == 0:
            return Penalties(0.0, 0.0, 0.0, spec.alpha), {}
        fmap = svd_feature_map(cumulative(seq), feature_rank)
        return theorem3_params(fmap, seq, spec.sigma, spec.alpha, spec.confidence_x), {}
    per_method = {}
    for method in spec.methods:
        if method == "nn":
            continue
        result = cross_validate(
            seq,
            method,
            spec.grid,
            folds=spec.cv_folds,
            seed=spec.fold_seed(run_index),
            cfg=cfg,
            feature_rank=feature_rank,
            binarize_threshold=spec.binarize_threshold,
        )
        per_method[method] = result.best
    return Penalties(0.0, 0.0, 0.0, spec.alpha), per_method


def _single_run(spec, run_index, T=None, rank=None):
    """Generate, tune, fit and score every method for one run index."""
    params = spec.generator_params(run_index, T=T, r=rank)
    feature_rank = spec.effective_feature_rank if rank is None else rank
    cfg = _solver_config(spec)
    results = []
    failures = []
    seed = spec.run_seed(run_index)
    try:
        dataset = generate(params)
        shared_pen, per_method = _resolve_penalties(
            spec, dataset.sequence, feature_rank, run_index, cfg
        )
    except Exception as exc:  # noqa: BLE001 - recorded, never dropped
        for method in spec.methods:
            failures.append(RunFailure(method, seed, params.T, params.r, str(exc)))
        return results, failures
    for method in spec.methods:
        pen = per_method.get(method, shared_pen)
        start = time.perf_counter()
        try:
            scores = score_method(method, dataset.sequence, pen, cfg, feature_rank)
            value = auc(scores, dataset.truth.A_next, spec.binarize_threshold)
        except Exception as exc:  # noqa: BLE001
            failures.append(RunFailure(method, seed, params.T, params.r, str(exc)))
            continue
        wall = time.perf_counter() - start
        results.append(
            RunResult(
                method=method,
                seed=seed,
                T=params.T,
                rank=params.r,
                auc=float(value),
                wall_time=wall,
            )
        )
        log.info(
            "run seed=%d T=%d rank=%d method=%s auc=%.4f (%.2fs)",
            seed,
            params.T,
            params.r,
            method,
            value,
            wall,
        )
    return results, failures


def _run_tasks(tasks, jobs):
    """Execute (spec, run, T, rank) tasks, deterministically ordered output."""
    if jobs <= 1:
        outcomes = [_single_run(*task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda t: _single_run(*t), tasks))
    results = [res for out in outcomes for res in out[0]]
    failures = [f for out in outcomes for f in out[1]]
    key = lambda item: (item.method, item.T, item.rank, item.seed)
    return sorted(results, key=key), sorted(failures, key=key)


def run_experiment(spec, jobs=1):
    """All (run, method) results for a spec; failures recorded separately."""
    tasks = [(spec, i, None, None) for i in range(spec.runs)]
    return _run_tasks(tasks, jobs)


def aggregate(results):
    """Per (method, T, rank) mean AUC with a 95% normal-approximation CI."""
    groups = {}
    for res in results:
        groups.setdefault((res.method, res.T, res.rank), []).append(res.auc)
    rows = []
    for (method, T, rank), values in sorted(groups.items()):
        n = len(values)
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
        rows.append(
            {
                "method": method,
                "T": T,
                "rank": rank,
                "mean_auc": mean,
                "ci_halfwidth": 1.96 * sd / math.sqrt(n),
                "n_runs": n,
            }
        )
    return rows


def sweep_phase(spec, T_values, rank_values, jobs=1):
    """Factorial (T, rank) sweep with the spec's run count per cell."""
    T_values = tuple(T_values)
    rank_values = tuple(rank_values)
    if not T_values or not rank_values:
        raise ValueError("sweep axes must be nonempty")
    tasks = [
        (spec, i, T, rank)
        for T in T_values
        for rank in rank_values
        for i in range(spec.runs)
    ]
    results, failures = _run_tasks(tasks, jobs)
    return SweepGrid(
        T_values=T_values,
        rank_values=rank_values,
        results=tuple(results),
        cells=tuple(aggregate(results)),
        failures=tuple(failures),
    )


def _fmt(value):
    if isinstance(value, float):
        return "%.17g" % value
    return value


def _write_csv(path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_results_csv(path, results):
    _write_csv(
        path,
        ["schema_version", "method", "seed", "T", "rank", "auc"],
        [
            [SCHEMA_VERSION, r.method, r.seed, r.T, r.rank, r.auc]
            for r in results
        ],
    )


def write_summary_csv(path, rows):
    _write_csv(
        path,
        ["schema_version", "method", "T", "rank", "mean_auc", "ci_halfwidth", "n_runs"],
        [
            [
                SCHEMA_VERSION,
                row["method"],
                row["T"],
                row["rank"],
                row["mean_auc"],
                row["ci_halfwidth"],
                row["n_runs"],
            ]
            for row in rows
        ],
    )


def write_timings_csv(path, results):
    """Wall times; informational only and excluded from determinism claims."""
    _write_csv(
        path,
        ["schema_version", "method", "seed", "T", "rank", "wall_time"],
        [[SCHEMA_VERSION, r.method, r.seed, r.T, r.rank, r.wall_time] for r in results],
    )


def write_failures_csv(path, failures):
    _write_csv(
        path,
        ["schema_version", "method", "seed", "T", "rank", "message"],
        [[SCHEMA_VERSION, f.method, f.seed, f.T, f.rank, f.message] for f in failures],
    )


def write_cv_table_csv(path, table):
    _write_csv(
        path,
        ["schema_version", "tau", "gamma", "kappa", "mean_auc", "folds_used"],
        [
            [
                SCHEMA_VERSION,
                row["tau"],
                row["gamma"],
                row["kappa"],
                row["mean_auc"],
                row["folds_used"],
            ]
            for row in table
        ],
    )


def write_concentration_csv(path, report):
    _write_csv(
        path,
        ["schema_version", "inequality", "bound", "trials", "violations", "rate", "cap"],
        [
            [
                SCHEMA_VERSION,
                row["inequality"],
                row["bound"],
                row["trials"],
                row["violations"],
                row["rate"],
                row["cap"],
            ]
            for row in report.rows()
        ],
    )


class ExperimentError(LinkvarError):
    """Raised when an experiment cannot produce any results."""
