"""Joint objective for simultaneous graph prediction and VAR estimation.

With features F(A) = apply(fmap, A) of shape m x r, stacks X_prev /
X_next of the observed transitions, phi_T = F(A_T) and d = m * r, the
objective is

    L(A, W) = (1/(d*T)) ||X_next - X_prev W||_F^2 + kappa ||W||_1
            + (1/d) ||F(A) - phi_T W||_F^2 + tau ||A||_* + gamma ||A||_1

minimized over A in the nonnegative orthant and unconstrained W. The
smooth part (the two quadratics) is Phi; its gradient and operator norm
drive the splitting solver's step size.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import features as ft
from .errors import DimensionError, SolverError


@dataclass(frozen=True)
class Penalties:
    """Smoothing parameters of the joint objective.

    tau weights the trace norm of A, gamma the entrywise l1 norm of A,
    kappa the entrywise l1 norm of W. alpha in (0, 1) balances the two
    A-penalties and is consumed only by tuning.
    """

    tau: float
    gamma: float
    kappa: float
    alpha: float = 0.5

    def __post_init__(self):
        for name in ("tau", "gamma", "kappa"):
            if getattr(self, name) < 0:
                raise ValueError(f"penalty {name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class ProblemData:
    """Feature stacks of an observed sequence plus the map that built them."""

    fmap: object
    X_prev: np.ndarray
    X_next: np.ndarray
    phi_T: np.ndarray
    n: int
    m: int
    r: int
    T: int

    @property
    def d_eff(self):
        return self.m * self.r


def build_problem_data(fmap, seq):
    stack = ft.feature_stack(fmap, seq)
    return ProblemData(
        fmap=fmap,
        X_prev=stack.X_prev,
        X_next=stack.X_next,
        phi_T=stack.phi_T,
        n=fmap.n,
        m=fmap.feature_rows,
        r=fmap.feature_cols,
        T=seq.horizon,
    )


def _check_shapes(A, W, data):
    A = np.asarray(A, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if A.shape != (data.n, data.n):
        raise DimensionError(f"A must be {data.n}x{data.n}, got {A.shape}")
    if W.shape != (data.r, data.r):
        raise DimensionError(f"W must be {data.r}x{data.r}, got {W.shape}")
    return A, W


def quad_loss(A, W, data):
    """Smooth part Phi(A, W) of the objective."""
    A, W = _check_shapes(A, W, data)
    d = data.d_eff
    r1 = data.X_next - data.X_prev @ W
    r2 = ft.apply(data.fmap, A) - data.phi_T @ W
    return float(np.sum(r1**2)) / (d * data.T) + float(np.sum(r2**2)) / d


def loss(A, W, data, pen):
    """Full objective: Phi plus the three penalties."""
    A, W = _check_shapes(A, W, data)
    value = quad_loss(A, W, data)
    if pen.kappa:
        value += pen.kappa * float(np.sum(np.abs(W)))
    if pen.tau:
        value += pen.tau * float(np.sum(np.linalg.svd(A, compute_uv=False)))
    if pen.gamma:
        value += pen.gamma * float(np.sum(np.abs(A)))
    return value


def quad_gradient(A, W, data):
    """Exact gradient of the smooth part Phi at (A, W)."""
    A, W = _check_shapes(A, W, data)
    d = data.d_eff
    r1 = data.X_next - data.X_prev @ W
    r2 = ft.apply(data.fmap, A) - data.phi_T @ W
    G_A = (2.0 / d) * ft.adjoint(data.fmap, r2)
    G_W = (-2.0 / (d * data.T)) * (data.X_prev.T @ r1) - (2.0 / d) * (data.phi_T.T @ r2)
    return G_A, G_W


def error_metric(A, W, truth_A_next, truth_W0, data):
    """Mixed prediction-estimation error at (A, W) against the truth.

    The square is (1/d) ||phi_T (W - W0) - F(A - A_next)||_F^2
    + (1/(d*T)) ||X_prev (W - W0)||_F^2; the square root is returned.
    """
    A, W = _check_shapes(A, W, data)
    truth_A_next = np.asarray(truth_A_next, dtype=np.float64)
    truth_W0 = np.asarray(truth_W0, dtype=np.float64)
    if truth_A_next.shape != (data.n, data.n) or truth_W0.shape != (data.r, data.r):
        raise DimensionError("truth shapes do not match the problem data")
    d = data.d_eff
    dw = W - truth_W0
    part1 = data.phi_T @ dw - ft.apply(data.fmap, A - truth_A_next)
    part2 = data.X_prev @ dw
    sq = float(np.sum(part1**2)) / d + float(np.sum(part2**2)) / (d * data.T)
    return math.sqrt(max(sq, 0.0))


def hessian_apply(P_A, P_W, data, base_gradient=None):
    """Apply the (constant) Hessian of Phi to a direction (P_A, P_W)."""
    if base_gradient is None:
        base_gradient = quad_gradient(
            np.zeros((data.n, data.n)), np.zeros((data.r, data.r)), data
        )
    g_A, g_W = quad_gradient(P_A, P_W, data)
    return g_A - base_gradient[0], g_W - base_gradient[1]


def lipschitz(data, rel_tol=1e-8, max_iter=10000, inflation=1.01, seed=0):
    """Operator norm of the Hessian of Phi by power iteration.

    The Rayleigh quotient is iterated until its relative change drops
    below ``rel_tol`` and the result is inflated by 1% so the returned
    value upper-bounds the true constant with margin. Raises SolverError
    on stagnation.
    """
    rng = np.random.default_rng(seed)
    v_A = rng.standard_normal((data.n, data.n))
    v_W = rng.standard_normal((data.r, data.r))
    norm = math.sqrt(np.sum(v_A**2) + np.sum(v_W**2))
    v_A /= norm
    v_W /= norm
    base = quad_gradient(np.zeros((data.n, data.n)), np.zeros((data.r, data.r)), data)
    rayleigh = 0.0
    for _ in range(max_iter):
        h_A, h_W = hessian_apply(v_A, v_W, data, base)
        new_rayleigh = float(np.sum(v_A * h_A) + np.sum(v_W * h_W))
        h_norm = math.sqrt(np.sum(h_A**2) + np.sum(h_W**2))
        if h_norm <= 1e-300:
            return 0.0  # Hessian annihilates the direction; operator is null
        if abs(new_rayleigh - rayleigh) <= rel_tol * max(abs(new_rayleigh), 1e-300):
            return new_rayleigh * inflation
        rayleigh = new_rayleigh
        v_A = h_A / h_norm
        v_W = h_W / h_norm
    raise SolverError(
        f"power iteration did not stabilize within {max_iter} iterations "
        f"(last Rayleigh quotient {rayleigh:.6e})"
    )
