"""Link-prediction methods sharing one scoring interface.

Five registered methods: "nn" (common-neighbor counts from the squared
cumulative adjacency matrix), static sparse+low-rank / low-rank fits of
the cumulative matrix, and the autoregressive sparse+low-rank /
low-rank joint fits. The "*-low-rank" variants are the same estimators
with the entrywise l1 weight forced to zero.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import SolverError
from .features import svd_feature_map
from .objective import build_problem_data
from .solver import SolverConfig, _advance_block, _rel_change, _terms_for, gfb_minimize

METHOD_NAMES = (
    "nn",
    "static-sparse-low-rank",
    "static-low-rank",
    "autoregressive-sparse-low-rank",
    "autoregressive-low-rank",
)

_FORCE_GAMMA_ZERO = ("static-low-rank", "autoregressive-low-rank")


@dataclass(frozen=True)
class ScoreMatrix:
    """Real-valued link scores; higher means a more likely edge.

    The diagonal (self-links) is excluded from evaluation unless
    ``include_diagonal`` is set.
    """

    scores: np.ndarray
    include_diagonal: bool = False

    def __post_init__(self):
        scores = np.array(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise ValueError(f"scores must be square, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)


def cumulative(seq):
    """Entrywise sum of all snapshots."""
    snaps = list(seq)
    if not snaps:
        raise ValueError("cannot accumulate an empty sequence")
    total = np.zeros_like(np.asarray(snaps[0], dtype=np.float64))
    for snap in snaps:
        total = total + np.asarray(snap, dtype=np.float64)
    return total


def nn_score(seq):
    """Common-neighbor scores: the square of the cumulative adjacency matrix."""
    acc = cumulative(seq)
    return ScoreMatrix(acc @ acc)


def static_fit(seq, pen, cfg=SolverConfig()):
    """Sparse + low-rank fit of the cumulative matrix.

    Minimizes ||X - C||_F^2 + tau ||X||_* + gamma ||X||_1 (C the
    cumulative matrix, X constrained nonnegative when the cone is
    enabled) with the same splitting machinery as the joint solver;
    pen.kappa is ignored. With gamma = 0 the unconstrained minimizer is
    the singular-value shrinkage of C at level tau/2, with tau = 0 the
    soft thresholding of C at gamma/2 (the objective carries no 1/2
    factor, hence the halved prox parameters).
    """
    C = cumulative(seq)
    theta = cfg.theta if cfg.theta is not None else cfg.theta_scale / 2.0  # L = 2 exactly
    terms = _terms_for(pen, cfg.enforce_nonneg)
    X = np.zeros_like(C)
    Z = [X.copy() for _ in terms]
    for it in range(1, cfg.max_iter + 1):
        G = 2.0 * (X - C)
        X_new = _advance_block(terms, Z, X, G, theta)
        if not np.all(np.isfinite(X_new)):
            raise SolverError(f"static fit diverged at iteration {it}")
        rel = _rel_change(X_new, X)
        X = X_new
        if rel < cfg.tol:
            break
    if cfg.enforce_nonneg:
        X = kernels.positive_part(X)
    return ScoreMatrix(X)


def autoregressive_score(fit):
    """Scores of a joint fit: the estimated next adjacency matrix."""
    return ScoreMatrix(fit.A_hat)


def effective_penalties(method, pen):
    """Per-method penalty adjustment: trace-only variants force gamma = 0."""
    if method in _FORCE_GAMMA_ZERO and pen.gamma != 0.0:
        return replace(pen, gamma=0.0)
    return pen


def score_method(method, seq, pen, cfg=SolverConfig(), feature_rank=None):
    """Fit one registered method on a sequence and return its ScoreMatrix."""
    if method not in METHOD_NAMES:
        raise ValueError(f"unknown method {method!r}; known: {', '.join(METHOD_NAMES)}")
    if method == "nn":
        return nn_score(seq)
    pen = effective_penalties(method, pen)
    if method.startswith("static"):
        return static_fit(seq, pen, cfg)
    if feature_rank is None:
        raise ValueError(f"method {method!r} needs a feature rank")
    fmap = svd_feature_map(cumulative(seq), feature_rank)
    data = build_problem_data(fmap, seq)
    return autoregressive_score(gfb_minimize(data, pen, cfg))
