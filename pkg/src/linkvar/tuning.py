"""Data-driven smoothing parameters, cross-validation, and Monte-Carlo
checks of the concentration bounds behind them.

``theorem3_params`` turns the observable variance quantities of a
feature map and sequence into the three penalties at a chosen
confidence level. ``concentration_check`` simulates Gaussian feature
noise and verifies the three deviation inequalities those penalties
rest on. ``cross_validate`` tunes penalties per method by masking
entry folds of the last observed snapshot.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import features as ft
from .baselines import score_method
from .data import GraphSequence
from .errors import SingleClassError
from .metrics import auc_vectors
from .objective import Penalties
from .solver import SolverConfig


def theorem3_params(fmap, seq, sigma, alpha=0.5, x=3.0):
    """Penalties from the observable variance terms at confidence level x.

    tau   = 3 alpha sigma v_op sqrt(2 (x + log 2n) / d)
    gamma = 3 (1 - alpha) sigma v_inf sqrt(2 (x + 2 log n) / d)
    kappa = 6 sigma sigma_omega (1/d) sqrt(2 e (x + 2 log d + ell_T) / (T + 1))
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if x <= 0:
        raise ValueError(f"confidence level x must be > 0, got {x}")
    n = fmap.n
    d = fmap.d_eff
    count = len(seq)  # T + 1
    vt = ft.variance_terms(fmap)
    sv = ft.sequence_variance(fmap, seq)
    tau = 3.0 * alpha * sigma * vt["v_op"] * math.sqrt(2.0 * (x + math.log(2 * n)) / d)
    gamma = (
        3.0 * (1.0 - alpha) * sigma * vt["v_inf"] * math.sqrt(2.0 * (x + 2.0 * math.log(n)) / d)
    )
    kappa = (
        6.0
        * sigma
        * sv["sigma_omega"]
        / d
        * math.sqrt(2.0 * math.e * (x + 2.0 * math.log(d) + sv["ell_T"]) / count)
    )
    return Penalties(tau=tau, gamma=gamma, kappa=kappa, alpha=alpha)


@dataclass(frozen=True)
class InequalityRecord:
    """Monte-Carlo tally for one concentration inequality."""

    name: str
    bound: float
    trials: int
    violations: int
    cap: float

    @property
    def rate(self):
        return self.violations / self.trials


@dataclass(frozen=True)
class ConcentrationReport:
    records: tuple

    def rows(self):
        return [
            {
                "inequality": rec.name,
                "bound": rec.bound,
                "trials": rec.trials,
                "violations": rec.violations,
                "rate": rec.rate,
                "cap": rec.cap,
            }
            for rec in self.records
        ]


def concentration_check(fmap, seq, sigma, x=3.0, trials=1000, seed=0):
    """Simulate i.i.d. Gaussian feature noise and tally bound violations.

    Per trial with noise vectors N_1..N_{T+1} ~ N(0, sigma^2 I_d):
    (a) the operator norm of (1/d) sum_j (N_{T+1})_j Omega_j against
        sigma v_op sqrt(2 (x + log 2n) / d), cap exp(-x);
    (b) the same matrix's largest absolute entry against
        sigma v_inf sqrt(2 (x + 2 log n) / d), cap 2 exp(-x);
    (c) the largest absolute entry of the averaged feature/noise cross
        moment (1/(T+1)) sum_t F(A_{t-1}) N_t^T against
        sigma sigma_omega sqrt(2 e (x + 2 log d + ell_T) / (T + 1)),
        cap 14 exp(-x). Caps are clipped at 1.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = fmap.n
    d = fmap.d_eff
    count = len(seq)  # T + 1
    vt = ft.variance_terms(fmap)
    sv = ft.sequence_variance(fmap, seq)
    bound_op = sigma * vt["v_op"] * math.sqrt(2.0 * (x + math.log(2 * n)) / d)
    bound_inf = sigma * vt["v_inf"] * math.sqrt(2.0 * (x + 2.0 * math.log(n)) / d)
    bound_cross = (
        sigma
        * sv["sigma_omega"]
        * math.sqrt(2.0 * math.e * (x + 2.0 * math.log(d) + sv["ell_T"]) / count)
    )
    feats = ft.flat_features(fmap, seq)  # (T+1) x d

    rng = np.random.default_rng(seed)
    viol = [0, 0, 0]
    for _ in range(trials):
        noise = sigma * rng.standard_normal((count, d))
        combo = ft.noise_combination(fmap, noise[-1])
        stat_op = float(np.linalg.norm(combo, 2))
        stat_inf = float(np.max(np.abs(combo)))
        cross = feats.T @ noise / count
        stat_cross = float(np.max(np.abs(cross)))
        viol[0] += stat_op > bound_op
        viol[1] += stat_inf > bound_inf
        viol[2] += stat_cross > bound_cross
    caps = (math.exp(-x), 2.0 * math.exp(-x), 14.0 * math.exp(-x))
    names = ("noise_combination_opnorm", "noise_combination_entrymax", "feature_noise_cross_max")
    bounds = (bound_op, bound_inf, bound_cross)
    return ConcentrationReport(
        records=tuple(
            InequalityRecord(
                name=name,
                bound=bound,
                trials=trials,
                violations=v,
                cap=min(cap, 1.0),
            )
            for name, bound, v, cap in zip(names, bounds, viol, caps)
        )
    )


def estimate_sigma(data):
    """Heuristic noise level for real data with unknown sigma.

    Root-mean-square of the one-step feature residuals under an
    ordinary least-squares VAR fit; not an unbiased estimator, just a
    usable scale when sigma is not supplied.
    """
    W_ls, *_ = np.linalg.lstsq(data.X_prev, data.X_next, rcond=None)
    resid = data.X_next - data.X_prev @ W_ls
    return float(np.sqrt(np.mean(resid**2)))


@dataclass(frozen=True)
class CvResult:
    best: Penalties
    table: tuple  # one row dict per grid cell
    skipped_folds: int


def _fold_positions(n, folds, seed):
    """Disjoint random folds covering every off-diagonal position once."""
    rows, cols = np.where(~np.eye(n, dtype=bool))
    order = np.random.default_rng(seed).permutation(rows.size)
    return [
        (rows[idx], cols[idx]) for idx in np.array_split(order, folds)
    ]


def cross_validate(
    seq,
    method,
    grid,
    folds=10,
    seed=0,
    cfg=SolverConfig(),
    feature_rank=None,
    binarize_threshold=1e-6,
):
    """Pick the grid cell with the best mean held-out AUC for one method.

    Each fold masks its off-diagonal entries of the last observed
    snapshot to zero (absent edges), refits the method on the masked
    sequence, and scores the held-out positions against the unmasked
    snapshot binarized at the threshold. Single-class folds are skipped
    with a warning; ties prefer the smallest tau + gamma + kappa, then
    grid order.
    """
    grid = tuple(grid)
    if not grid:
        raise ValueError("penalty grid must be nonempty")
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    last = seq[-1]
    fold_pos = _fold_positions(seq.n, folds, seed)

    masked_seqs = []
    labels = []
    for rows, cols in fold_pos:
        masked = np.array(last)
        masked[rows, cols] = 0.0
        masked_seqs.append(GraphSequence([*seq.snapshots[:-1], masked]))
        labels.append(last[rows, cols] > binarize_threshold)

    table = []
    skipped_total = 0
    best = None
    best_key = None
    for index, pen in enumerate(grid):
        fold_aucs = []
        for (rows, cols), masked_seq, lab in zip(fold_pos, masked_seqs, labels):
            scores = score_method(method, masked_seq, pen, cfg, feature_rank)
            try:
                fold_aucs.append(auc_vectors(scores.scores[rows, cols], lab))
            except SingleClassError:
                skipped_total += 1
                warnings.warn(
                    f"skipping a single-class fold while tuning {method}", stacklevel=2
                )
        if not fold_aucs:
            raise SingleClassError(
                f"every fold was single-class while tuning {method}; cannot cross-validate"
            )
        mean_auc = float(np.mean(fold_aucs))
        table.append(
            {
                "tau": pen.tau,
                "gamma": pen.gamma,
                "kappa": pen.kappa,
                "mean_auc": mean_auc,
                "folds_used": len(fold_aucs),
            }
        )
        key = (-mean_auc, pen.tau + pen.gamma + pen.kappa, index)
        if best_key is None or key < best_key:
            best_key = key
            best = pen
    return CvResult(best=best, table=tuple(table), skipped_folds=skipped_total)
