"""Ranking metrics for link prediction.

The AUC is the Mann-Whitney statistic: over all (positive, negative)
position pairs, the fraction where the positive's score is strictly
higher, with ties counted 1/2. Counts are exact integers, so the
returned value matches an exhaustive pair-count double loop bit for
bit.
"""

import numpy as np

from . import kernels
from .baselines import ScoreMatrix
from .errors import DimensionError, SingleClassError


def auc_vectors(scores, labels):
    """AUC of a score vector against boolean labels."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels, dtype=bool).ravel()
    if scores.shape != labels.shape:
        raise DimensionError(f"scores {scores.shape} vs labels {labels.shape}")
    n_pos = int(np.sum(labels))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(
            f"AUC undefined: {n_pos} positive and {n_neg} negative positions"
        )
    order = np.argsort(scores, kind="stable")
    wins, ties = kernels.auc_pair_counts(
        scores[order], labels[order].astype(np.int64)
    )
    return (wins + 0.5 * ties) / (n_pos * n_neg)


def auc(scores, truth, binarize_threshold=1e-6, include_diagonal=False):
    """AUC of link scores against a truth matrix binarized at a threshold.

    ``scores`` may be a ScoreMatrix (whose diagonal policy is honored)
    or a plain matrix. Entries of ``truth`` strictly above the threshold
    are positives; the diagonal is excluded unless requested.
    """
    if isinstance(scores, ScoreMatrix):
        include_diagonal = scores.include_diagonal
        scores = scores.scores
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if scores.shape != truth.shape or scores.ndim != 2:
        raise DimensionError(f"scores {scores.shape} vs truth {truth.shape}")
    if include_diagonal:
        mask = np.ones(scores.shape, dtype=bool)
    else:
        mask = ~np.eye(scores.shape[0], dtype=bool)
    return auc_vectors(scores[mask], truth[mask] > binarize_threshold)
