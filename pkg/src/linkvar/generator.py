"""Synthetic graph sequences with linearly autoregressive features.

The latent trajectory follows U_t = U_{t-1} W0 + N_t with sparse noise,
snapshots are A_t = U_t V0^T + M_t, and the observed sequence is
A_0..A_T with A_{T+1} kept as ground truth. V0, U0, W0 are sparse
(Bernoulli mask times uniform values) and W0 is rescaled to a fixed
spectral norm so the recursion stays bounded. Observed snapshots are
clamped to nonnegative entries (the clamped fraction is recorded);
pre-clamp matrices are kept for diagnostics.
"""

from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .data import GraphSequence, SyntheticDataset, TruthRecord

_MAX_FACTOR_REDRAWS = 100


@dataclass(frozen=True)
class GeneratorParams:
    """Settings of the synthetic sequence generator.

    ``density`` is the nonzero fraction of V0, U0 and W0;
    ``noise_threshold`` (defaults to sigma) soft-thresholds the Gaussian
    noise entries; ``factor_mode`` draws factor values uniform on
    [-1, 1] ("signed") or [0, 1] ("nonneg").
    """

    n: int
    r: int
    T: int
    sigma: float
    density: float = 0.3
    noise_threshold: float | None = None
    factor_mode: str = "signed"
    w0_spectral_norm: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 1 <= self.r <= self.n:
            raise ValueError(f"r must lie in [1, n], got {self.r}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not 0 < self.density <= 1:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.noise_threshold is not None and self.noise_threshold < 0:
            raise ValueError(f"noise_threshold must be >= 0, got {self.noise_threshold}")
        if self.factor_mode not in ("signed", "nonneg"):
            raise ValueError(f"factor_mode must be 'signed' or 'nonneg', got {self.factor_mode}")
        if self.w0_spectral_norm <= 0:
            raise ValueError("w0_spectral_norm must be positive")

    @property
    def threshold(self):
        return self.sigma if self.noise_threshold is None else self.noise_threshold


def sparse_noise(rows, cols, sigma, threshold, rng):
    """Soft-thresholded i.i.d. Gaussian noise: sign(g) * (|g| - threshold)_+ ."""
    if sigma < 0 or threshold < 0:
        raise ValueError("sigma and threshold must be >= 0")
    g = sigma * rng.standard_normal((rows, cols))
    return kernels.soft_threshold(g, threshold)


def _sparse_factor(rows, cols, density, mode, rng):
    """Bernoulli(density) mask times uniform values; redrawn if all-zero."""
    for _ in range(_MAX_FACTOR_REDRAWS):
        mask = rng.random((rows, cols)) < density
        low = -1.0 if mode == "signed" else 0.0
        values = rng.uniform(low, 1.0, (rows, cols))
        factor = mask * values
        if np.any(factor != 0.0):
            return factor
    raise RuntimeError(f"failed to draw a nonzero {rows}x{cols} factor at density {density}")


def generate(params):
    """Draw one synthetic dataset; pure function of the params (incl. seed)."""
    rng = np.random.default_rng(params.seed)
    V0 = _sparse_factor(params.n, params.r, params.density, params.factor_mode, rng)
    U0 = _sparse_factor(params.n, params.r, params.density, params.factor_mode, rng)
    W0 = _sparse_factor(params.r, params.r, params.density, params.factor_mode, rng)
    opnorm = float(np.linalg.svd(W0, compute_uv=False)[0])
    W0 = W0 * (params.w0_spectral_norm / opnorm)

    threshold = params.threshold
    U_traj = [U0]
    raw = [U0 @ V0.T + sparse_noise(params.n, params.n, params.sigma, threshold, rng)]
    for _ in range(1, params.T + 2):  # t = 1 .. T+1
        N_t = sparse_noise(params.n, params.r, params.sigma, threshold, rng)
        U_t = U_traj[-1] @ W0 + N_t
        M_t = sparse_noise(params.n, params.n, params.sigma, threshold, rng)
        U_traj.append(U_t)
        raw.append(U_t @ V0.T + M_t)

    clamped = [kernels.positive_part(A) for A in raw]
    total = sum(A.size for A in raw)
    n_clamped = sum(int(np.sum(A < 0)) for A in raw)
    for arr in (*raw, *clamped, *U_traj, W0, V0):
        arr.flags.writeable = False

    return SyntheticDataset(
        sequence=GraphSequence(clamped[: params.T + 1]),
        truth=TruthRecord(
            A_next=clamped[params.T + 1],
            W0=W0,
            V0=V0,
            U_trajectory=tuple(U_traj),
        ),
        params=asdict(params),
        clamped_fraction=n_clamped / total,
        raw_snapshots=tuple(raw),
    )


def truth_feature_transform(V0):
    """Matrix (V0^dagger)^T so that the truth features are A @ (V0^dagger)^T."""
    return np.linalg.pinv(V0).T
