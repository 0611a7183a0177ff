"""Pure-numpy implementations of the hot elementwise kernels.

Every function here has a numba twin in ``_numba.py`` with the same
signature and bit-identical output (elementwise IEEE operations applied
in the same order). Inputs are never mutated.
"""

import numpy as np


def soft_threshold(z, lam):
    """Entrywise sign(z) * max(|z| - lam, 0)."""
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def positive_part(z):
    """Entrywise max(z, 0)."""
    return np.maximum(z, 0.0)


def prox_input(a, z, g, theta):
    """Argument 2a - z - theta*g fed to a proximal map."""
    return 2.0 * a - z - theta * g


def relax(z, a, p):
    """Relaxed auxiliary update z + p - a."""
    return z + p - a


def l1_term_update(z, a, g, theta, lam):
    """Fused z + soft_threshold(2a - z - theta*g, lam) - a."""
    y = 2.0 * a - z - theta * g
    return z + np.sign(y) * np.maximum(np.abs(y) - lam, 0.0) - a


def cone_term_update(z, a, g, theta):
    """Fused z + max(2a - z - theta*g, 0) - a."""
    return z + np.maximum(2.0 * a - z - theta * g, 0.0) - a


def average2(x, y):
    return (x + y) / 2.0


def average3(x, y, w):
    return (x + y + w) / 3.0


def w_prox_step(w, g, theta, kappa):
    """Forward-backward step soft_threshold(w - theta*g, theta*kappa)."""
    y = w - theta * g
    return np.sign(y) * np.maximum(np.abs(y) - theta * kappa, 0.0)


def auc_pair_counts(scores_sorted, labels_sorted):
    """Count (wins, ties) over positive/negative pairs of sorted scores.

    ``scores_sorted`` must be ascending and ``labels_sorted`` the 0/1
    labels in the same order. A pair is a win when the positive scores
    strictly higher than the negative; ties are equal-score pairs.
    Returns two exact int64 counts.
    """
    y = np.asarray(labels_sorted, dtype=np.int64)
    s = np.asarray(scores_sorted)
    neg = 1 - y
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    ends = np.r_[starts[1:], len(s)]
    pos_cum = np.r_[0, np.cumsum(y)]
    neg_cum = np.r_[0, np.cumsum(neg)]
    pos_g = pos_cum[ends] - pos_cum[starts]
    neg_g = neg_cum[ends] - neg_cum[starts]
    wins = int(np.sum(pos_g * neg_cum[starts]))
    ties = int(np.sum(pos_g * neg_g))
    return wins, ties
