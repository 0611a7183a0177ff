"""Proximal operators and SVD utilities for the splitting solver.

All functions are pure. ``prox_l1`` and ``prox_trace`` solve
``argmin_X (1/2)||X - Z||_F^2 + lam * pen(X)`` for the entrywise l1 norm
and the trace norm respectively; ``project_nonneg`` is the Euclidean
projection onto the nonnegative orthant.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, SolverError

# Singular values below RANK_CUTOFF * sigma_max count as zero when
# building subspace projectors.
RANK_CUTOFF = 1e-10


@dataclass(frozen=True)
class Svd:
    """Thin SVD with a deterministic sign convention.

    In each column of U the entry of largest magnitude (lowest index on
    ties) is nonnegative; V's column is flipped to match, so
    U @ diag(singular_values) @ V.T reconstructs the input.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def deterministic_svd(Z):
    """Thin SVD of a 2-D matrix with reproducible factor signs."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise DimensionError(f"svd expects a 2-D matrix, got shape {Z.shape}")
    try:
        U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SVD did not converge on a {Z.shape} matrix: {exc}") from exc
    lead = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[lead, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    V = Vt.T * signs
    return Svd(U=U, singular_values=s, V=V)


def prox_l1(Z, lam):
    """Entrywise soft thresholding sign(Z) * (|Z| - lam)_+."""
    if lam < 0:
        raise ValueError(f"l1 prox weight must be >= 0, got {lam}")
    return kernels.soft_threshold(np.asarray(Z, dtype=np.float64), lam)


def prox_trace(Z, lam):
    """Singular value shrinkage U diag((sigma - lam)_+) V^T."""
    if lam < 0:
        raise ValueError(f"trace prox weight must be >= 0, got {lam}")
    svd = deterministic_svd(Z)
    shrunk = np.maximum(svd.singular_values - lam, 0.0)
    return (svd.U * shrunk) @ svd.V.T


def project_nonneg(Z):
    """Componentwise positive part (Z)_+."""
    return kernels.positive_part(np.asarray(Z, dtype=np.float64))


def subspace_projectors(A, B):
    """Split B into components parallel and orthogonal to A's row/column spaces.

    parallel = P_U B + B P_V - P_U B P_V and orthogonal = (I - P_U) B (I - P_V)
    with P_U, P_V built from the singular vectors of A whose singular
    values exceed RANK_CUTOFF relative to the largest. The two parts sum
    to B and the split is idempotent.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch: A {A.shape} vs B {B.shape}")
    svd = deterministic_svd(A)
    smax = svd.singular_values[0] if svd.singular_values.size else 0.0
    if smax <= 0.0:
        raise ValueError("subspace projectors are undefined for a numerically zero matrix")
    keep = svd.singular_values > RANK_CUTOFF * smax
    U = svd.U[:, keep]
    V = svd.V[:, keep]
    PU_B = U @ (U.T @ B)
    B_PV = (B @ V) @ V.T
    PU_B_PV = U @ ((U.T @ B) @ V) @ V.T
    parallel = PU_B + B_PV - PU_B_PV
    return {"parallel": parallel, "orthogonal": B - parallel}
