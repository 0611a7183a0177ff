"""Generalized forward-backward splitting for the joint objective.

The iteration keeps one auxiliary matrix Z_k per simple term of the
A-block (trace norm, l1 norm, and the nonnegativity cone when enabled):

    Z_k <- Z_k + prox_{q*theta*w_k}(2A - Z_k - theta*G_A) - A
    A   <- (1/q) * sum_k Z_k
    W   <- prox_{theta*kappa*l1}(W - theta*G_W)

with (G_A, G_W) the gradient of the smooth part and theta < 2/L. The
relaxation term "Z_k - A +" around the proximal image makes the fixed
points exactly the minimizers; averaging weight is 1 (plain mean).
"""

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SolverError
from .objective import lipschitz, loss, quad_gradient
from .prox import prox_trace

_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Splitting solver settings.

    ``theta`` overrides the step size; when None it is theta_scale / L
    with L estimated from the data. ``init`` warm-starts (A, W);
    ``trace_path`` dumps one CSV row per iteration.
    """

    theta: float | None = None
    theta_scale: float = 1.9
    max_iter: int = 10000
    tol: float = 1e-6
    enforce_nonneg: bool = True
    init: tuple | None = None
    trace_path: str | None = None

    def __post_init__(self):
        if self.theta is not None and self.theta <= 0:
            raise ValueError(f"step size must be positive, got {self.theta}")
        if not 0 < self.theta_scale:
            raise ValueError(f"theta_scale must be positive, got {self.theta_scale}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class FitResult:
    """Solver output: estimates, iteration trace and a fixed-point certificate."""

    A_hat: np.ndarray
    W_hat: np.ndarray
    iterations: int
    converged: bool
    objective: np.ndarray  # loss at init, then one value per iteration
    final_residual: float
    theta: float
    lipschitz_bound: float


def _terms_for(pen, enforce_nonneg):
    terms = [("trace", pen.tau), ("l1", pen.gamma)]
    if enforce_nonneg:
        terms.append(("cone", 0.0))
    return terms


def _advance_block(terms, Z, A, G, theta):
    """One relaxed prox sweep over the simple terms; returns the new mean."""
    q = len(terms)
    for idx, (kind, weight) in enumerate(terms):
        if kind == "l1":
            Z[idx] = kernels.l1_term_update(Z[idx], A, G, theta, q * theta * weight)
        elif kind == "cone":
            Z[idx] = kernels.cone_term_update(Z[idx], A, G, theta)
        else:
            Y = kernels.prox_input(A, Z[idx], G, theta)
            Z[idx] = kernels.relax(Z[idx], A, prox_trace(Y, q * theta * weight))
    if q == 2:
        return kernels.average2(Z[0], Z[1])
    if q == 3:
        return kernels.average3(Z[0], Z[1], Z[2])
    return sum(Z) / q


def _rel_change(new, old):
    denom = max(float(np.linalg.norm(new)), float(np.linalg.norm(old)), _REL_FLOOR)
    return float(np.linalg.norm(new - old)) / denom


def _step_size(cfg, L):
    if cfg.theta is not None:
        theta = cfg.theta
    elif L > 0:
        theta = cfg.theta_scale / L
    else:
        theta = 1.0  # quadratic part is constant; any step works
    if L > 0 and theta >= 2.0 / L:
        warnings.warn(
            f"step size {theta:.3e} is not below 2/L = {2.0 / L:.3e};"
            " convergence is not guaranteed",
            stacklevel=3,
        )
    return theta


def gfb_minimize(data, pen, cfg=SolverConfig()):
    """Minimize the joint objective by generalized forward-backward splitting."""
    L = lipschitz(data)
    theta = _step_size(cfg, L)
    if cfg.init is not None:
        A = np.array(cfg.init[0], dtype=np.float64)
        W = np.array(cfg.init[1], dtype=np.float64)
    else:
        A = np.zeros((data.n, data.n))
        W = np.zeros((data.r, data.r))
    terms = _terms_for(pen, cfg.enforce_nonneg)
    Z = [A.copy() for _ in terms]

    objective = [loss(A, W, data, pen)]
    trace_rows = []
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iter + 1):
        G_A, G_W = quad_gradient(A, W, data)
        A_new = _advance_block(terms, Z, A, G_A, theta)
        W_new = kernels.w_prox_step(W, G_W, theta, pen.kappa)
        if not (np.all(np.isfinite(A_new)) and np.all(np.isfinite(W_new))):
            raise SolverError(f"iterates diverged to non-finite values at iteration {it}")
        rel_dA = _rel_change(A_new, A)
        rel_dW = _rel_change(W_new, W)
        A, W = A_new, W_new
        objective.append(loss(A, W, data, pen))
        iterations = it
        if cfg.trace_path is not None:
            trace_rows.append((it, objective[-1], rel_dA, rel_dW))
        if max(rel_dA, rel_dW) < cfg.tol:
            converged = True
            break

    if cfg.enforce_nonneg:
        A = kernels.positive_part(A)
    if cfg.trace_path is not None:
        _write_trace(cfg.trace_path, trace_rows)
    residual = optimality_residual(A, W, data, pen, cfg, lipschitz_bound=L)
    A.flags.writeable = False
    W.flags.writeable = False
    obj = np.array(objective)
    obj.flags.writeable = False
    return FitResult(
        A_hat=A,
        W_hat=W,
        iterations=iterations,
        converged=converged,
        objective=obj,
        final_residual=residual,
        theta=theta,
        lipschitz_bound=L,
    )


def optimality_residual(A, W, data, pen, cfg=SolverConfig(), lipschitz_bound=None):
    """Fixed-point gap of one exact solver iteration at (A, W).

    Auxiliary states are re-derived by one warm-up sweep started from
    Z_k = A; the residual is ||A - T_A||_F + ||W - T_W||_F for the
    (A, W) image of one further iteration. Zero exactly at fixed points
    of the iteration.
    """
    A = np.asarray(A, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    L = lipschitz(data) if lipschitz_bound is None else lipschitz_bound
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        theta = _step_size(cfg, L)
    terms = _terms_for(pen, cfg.enforce_nonneg)
    G_A, G_W = quad_gradient(A, W, data)
    Z = [A.copy() for _ in terms]
    _advance_block(terms, Z, A, G_A, theta)  # warm-up: leaves Z_k = prox_k(A - theta G_A)
    T_A = _advance_block(terms, Z, A, G_A, theta)
    T_W = kernels.w_prox_step(W, G_W, theta, pen.kappa)
    return float(np.linalg.norm(A - T_A)) + float(np.linalg.norm(W - T_W))


def _write_trace(path, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "objective", "rel_dA", "rel_dW"])
        for it, obj, da, dw in rows:
            writer.writerow([it, "%.17g" % obj, "%.17g" % da, "%.17g" % dw])
