"""Linear feature maps on adjacency matrices, their adjoints, and the
observable variance quantities used for data-driven penalty tuning.

Two variants share one interface. An OmegaList map sends an n x n
matrix A to the 1 x d row of Euclidean products <Omega_j, A>; a
RightProjection map with an orthonormal n x r matrix V sends A to the
n x r matrix A @ V. Features of a snapshot are always m x r matrices
(m = 1 for OmegaList) and the VAR dynamics act on the right:
F(A_{t+1}) = F(A_t) @ W + noise.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .mmio import read_matrix, write_matrix

ORTHONORMAL_TOL = 1e-10


def _freeze(arr):
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class OmegaList:
    """Feature map A -> (<Omega_1, A>, ..., <Omega_d, A>) as a 1 x d row."""

    omegas: np.ndarray  # (d, n, n)

    def __init__(self, omegas):
        stack = _freeze(np.stack([np.asarray(o, dtype=np.float64) for o in omegas]))
        if stack.ndim != 3 or stack.shape[0] < 1:
            raise DimensionError(f"need a nonempty stack of matrices, got shape {stack.shape}")
        if stack.shape[1] != stack.shape[2]:
            raise DimensionError(f"coefficient matrices must be square, got {stack.shape[1:]}")
        object.__setattr__(self, "omegas", stack)

    @property
    def n(self):
        return self.omegas.shape[1]

    @property
    def d(self):
        return self.omegas.shape[0]

    @property
    def feature_rows(self):
        return 1

    @property
    def feature_cols(self):
        return self.d

    @property
    def d_eff(self):
        return self.d


@dataclass(frozen=True)
class RightProjection:
    """Feature map A -> A @ V for V with orthonormal columns."""

    V: np.ndarray  # (n, r)

    def __init__(self, V):
        V = _freeze(V)
        if V.ndim != 2 or V.shape[0] < V.shape[1] or V.shape[1] < 1:
            raise DimensionError(f"V must be n x r with 1 <= r <= n, got {V.shape}")
        gram = V.T @ V
        err = np.linalg.norm(gram - np.eye(V.shape[1]))
        if err > ORTHONORMAL_TOL:
            raise ValueError(f"columns of V are not orthonormal (deviation {err:.3e})")
        object.__setattr__(self, "V", V)

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def feature_rows(self):
        return self.V.shape[0]

    @property
    def feature_cols(self):
        return self.V.shape[1]

    @property
    def d_eff(self):
        return self.V.shape[0] * self.V.shape[1]


@dataclass(frozen=True)
class FeatureStack:
    """Stacked features of a graph sequence for the joint objective.

    X_prev stacks F(A_0)..F(A_{T-1}), X_next stacks F(A_1)..F(A_T)
    (both (T*m) x r), and phi_T = F(A_T).
    """

    X_prev: np.ndarray
    X_next: np.ndarray
    phi_T: np.ndarray


def apply(fmap, A):
    """Evaluate the feature map on one adjacency matrix."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape != (fmap.n, fmap.n):
        raise DimensionError(f"expected a {fmap.n}x{fmap.n} matrix, got {A.shape}")
    if isinstance(fmap, OmegaList):
        vals = np.tensordot(fmap.omegas, A, axes=([1, 2], [0, 1]))
        return vals.reshape(1, fmap.d)
    return A @ fmap.V


def adjoint(fmap, X):
    """Adjoint map: <apply(fmap, A), X> = <A, adjoint(fmap, X)> for all A."""
    X = np.asarray(X, dtype=np.float64)
    shape = (fmap.feature_rows, fmap.feature_cols)
    if X.shape != shape:
        raise DimensionError(f"expected a {shape[0]}x{shape[1]} feature matrix, got {X.shape}")
    if isinstance(fmap, OmegaList):
        return np.tensordot(X.ravel(), fmap.omegas, axes=(0, 0))
    return X @ fmap.V.T


def feature_stack(fmap, seq):
    """Build the FeatureStack of a GraphSequence."""
    feats = [apply(fmap, A) for A in seq]
    return FeatureStack(
        X_prev=_freeze(np.vstack(feats[:-1])),
        X_next=_freeze(np.vstack(feats[1:])),
        phi_T=_freeze(feats[-1]),
    )


def flat_features(fmap, seq):
    """(T+1) x d_eff array whose rows are the flattened snapshot features."""
    return np.vstack([apply(fmap, A).ravel() for A in seq])


def variance_terms(fmap):
    """Observable map variances (v_op, v_inf).

    v_op^2 is the larger operator norm of the averaged Gram matrices
    (1/d) sum Omega_j^T Omega_j and (1/d) sum Omega_j Omega_j^T;
    v_inf^2 is the largest entry of (1/d) sum Omega_j o Omega_j. A
    RightProjection map is treated as the equivalent list of the n*r
    rank-one matrices e_i v_j^T (closed forms below; the literal
    conversion is available via omega_list_equivalent).
    """
    if isinstance(fmap, OmegaList):
        d = fmap.d
        gram_cols = np.einsum("jab,jac->bc", fmap.omegas, fmap.omegas) / d
        gram_rows = np.einsum("jab,jcb->ac", fmap.omegas, fmap.omegas) / d
        v_op2 = max(
            float(np.linalg.eigvalsh(gram_cols)[-1]),
            float(np.linalg.eigvalsh(gram_rows)[-1]),
        )
        v_inf2 = float(np.max(np.mean(fmap.omegas**2, axis=0)))
    else:
        d = fmap.d_eff
        n, r = fmap.V.shape
        smax = float(np.linalg.svd(fmap.V, compute_uv=False)[0])
        v_op2 = max(smax**2 / r, float(np.sum(fmap.V**2)) / d)
        v_inf2 = float(np.max(np.sum(fmap.V**2, axis=1))) / d
    return {"v_op": math.sqrt(max(v_op2, 0.0)), "v_inf": math.sqrt(max(v_inf2, 0.0))}


def sequence_variance(fmap, seq):
    """Observable sequence variances (sigma_omega, ell_T).

    With S_j the sum over the T+1 observed snapshots of the squared
    j-th feature coordinate, sigma_omega^2 = max_j S_j / (T+1) and
    ell_T = 2 max_j log log(S_j/(T+1) v (T+1)/S_j v e). An all-zero
    coordinate (S_j = 0) falls back to the e clamp and contributes 0.
    """
    feats = flat_features(fmap, seq)
    count = feats.shape[0]  # T + 1 snapshots
    S = np.sum(feats**2, axis=0)
    sigma_omega = math.sqrt(float(np.max(S)) / count)
    ratio = S / count
    with np.errstate(divide="ignore"):
        inv = np.where(S > 0, count / np.where(S > 0, S, 1.0), 0.0)
    inner = np.maximum(np.maximum(ratio, inv), math.e)
    ell_T = 2.0 * float(np.max(np.log(np.log(inner))))
    return {"sigma_omega": sigma_omega, "ell_T": ell_T}


def omega_list_equivalent(fmap):
    """Literal OmegaList e_i v_j^T conversion of a RightProjection map.

    Coordinate (i, j) maps to flat index i*r + j, matching the row-major
    flattening used by flat_features. Intended for tests and small n.
    """
    if isinstance(fmap, OmegaList):
        return fmap
    n, r = fmap.V.shape
    omegas = np.zeros((n * r, n, n))
    for i in range(n):
        for j in range(r):
            omegas[i * r + j, i, :] = fmap.V[:, j]
    return OmegaList(omegas)


def noise_combination(fmap, coeffs):
    """(1/d) sum_j coeffs_j Omega_j as an n x n matrix.

    ``coeffs`` has length d_eff in the flat coordinate order of the map.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64).ravel()
    if coeffs.size != fmap.d_eff:
        raise DimensionError(f"expected {fmap.d_eff} coefficients, got {coeffs.size}")
    if isinstance(fmap, OmegaList):
        return np.tensordot(coeffs, fmap.omegas, axes=(0, 0)) / fmap.d
    n, r = fmap.V.shape
    return (coeffs.reshape(n, r) @ fmap.V.T) / fmap.d_eff


def svd_feature_map(cumulative_matrix, rank):
    """RightProjection onto the top-``rank`` right singular vectors."""
    from .prox import deterministic_svd

    M = np.asarray(cumulative_matrix, dtype=np.float64)
    if rank < 1 or rank > min(M.shape):
        raise ValueError(f"feature rank {rank} outside [1, {min(M.shape)}]")
    svd = deterministic_svd(M)
    return RightProjection(svd.V[:, :rank])


def save_feature_map(fmap, out_dir):
    """Persist a feature map as a directory (manifest + MatrixMarket files)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(fmap, OmegaList):
        manifest = {"variant": "omega_list", "d": fmap.d}
        for j in range(fmap.d):
            write_matrix(fmap.omegas[j], out / f"omega_{j:04d}.mtx")
    else:
        manifest = {"variant": "right_projection", "rank": fmap.feature_cols}
        write_matrix(fmap.V, out / "V.mtx")
    with open(out / "manifest.json", "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_feature_map(map_dir):
    map_dir = Path(map_dir)
    with open(map_dir / "manifest.json", "r", encoding="ascii") as fh:
        manifest = json.load(fh)
    if manifest["variant"] == "omega_list":
        omegas = [read_matrix(map_dir / f"omega_{j:04d}.mtx") for j in range(manifest["d"])]
        return OmegaList(omegas)
    if manifest["variant"] == "right_projection":
        return RightProjection(read_matrix(map_dir / "V.mtx"))
    raise ValueError(f"unknown feature map variant {manifest['variant']!r}")
