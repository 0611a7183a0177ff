"""Numba-compiled twins of the kernels in ``_numpy.py``.

The cores run on flat views of C-contiguous float64 arrays; thin
wrappers restore shapes. No fastmath: each elementwise operation keeps
IEEE semantics so results match the numpy backend bit for bit.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _soft_threshold_flat(z, lam):
    out = np.empty_like(z)
    for i in range(z.size):
        v = np.abs(z[i]) - lam
        if v < 0.0:
            v = 0.0
        out[i] = np.sign(z[i]) * v
    return out


@njit(cache=True, nogil=True)
def _positive_part_flat(z):
    out = np.empty_like(z)
    for i in range(z.size):
        out[i] = max(z[i], 0.0)
    return out


@njit(cache=True, nogil=True)
def _prox_input_flat(a, z, g, theta):
    out = np.empty_like(a)
    for i in range(a.size):
        out[i] = 2.0 * a[i] - z[i] - theta * g[i]
    return out


@njit(cache=True, nogil=True)
def _relax_flat(z, a, p):
    out = np.empty_like(z)
    for i in range(z.size):
        out[i] = z[i] + p[i] - a[i]
    return out


@njit(cache=True, nogil=True)
def _l1_term_update_flat(z, a, g, theta, lam):
    out = np.empty_like(z)
    for i in range(z.size):
        y = 2.0 * a[i] - z[i] - theta * g[i]
        v = np.abs(y) - lam
        if v < 0.0:
            v = 0.0
        out[i] = z[i] + np.sign(y) * v - a[i]
    return out


@njit(cache=True, nogil=True)
def _cone_term_update_flat(z, a, g, theta):
    out = np.empty_like(z)
    for i in range(z.size):
        y = 2.0 * a[i] - z[i] - theta * g[i]
        out[i] = z[i] + max(y, 0.0) - a[i]
    return out


@njit(cache=True, nogil=True)
def _average2_flat(x, y):
    out = np.empty_like(x)
    for i in range(x.size):
        out[i] = (x[i] + y[i]) / 2.0
    return out


@njit(cache=True, nogil=True)
def _average3_flat(x, y, w):
    out = np.empty_like(x)
    for i in range(x.size):
        out[i] = (x[i] + y[i] + w[i]) / 3.0
    return out


@njit(cache=True, nogil=True)
def _w_prox_step_flat(w, g, theta, kappa):
    out = np.empty_like(w)
    for i in range(w.size):
        y = w[i] - theta * g[i]
        v = np.abs(y) - theta * kappa
        if v < 0.0:
            v = 0.0
        out[i] = np.sign(y) * v
    return out


@njit(cache=True, nogil=True)
def _auc_pair_counts(scores_sorted, labels_sorted):
    n = scores_sorted.size
    wins = np.int64(0)
    ties = np.int64(0)
    negs_before = np.int64(0)
    i = 0
    while i < n:
        j = i
        pos_g = np.int64(0)
        neg_g = np.int64(0)
        while j < n and scores_sorted[j] == scores_sorted[i]:
            if labels_sorted[j] == 1:
                pos_g += 1
            else:
                neg_g += 1
            j += 1
        wins += pos_g * negs_before
        ties += pos_g * neg_g
        negs_before += neg_g
        i = j
    return wins, ties


def _flat(x):
    return np.ascontiguousarray(x, dtype=np.float64).ravel()


def soft_threshold(z, lam):
    z = np.asarray(z, dtype=np.float64)
    return _soft_threshold_flat(_flat(z), float(lam)).reshape(z.shape)


def positive_part(z):
    z = np.asarray(z, dtype=np.float64)
    return _positive_part_flat(_flat(z)).reshape(z.shape)


def prox_input(a, z, g, theta):
    return _prox_input_flat(_flat(a), _flat(z), _flat(g), float(theta)).reshape(a.shape)


def relax(z, a, p):
    return _relax_flat(_flat(z), _flat(a), _flat(p)).reshape(z.shape)


def l1_term_update(z, a, g, theta, lam):
    return _l1_term_update_flat(
        _flat(z), _flat(a), _flat(g), float(theta), float(lam)
    ).reshape(z.shape)


def cone_term_update(z, a, g, theta):
    return _cone_term_update_flat(_flat(z), _flat(a), _flat(g), float(theta)).reshape(z.shape)


def average2(x, y):
    return _average2_flat(_flat(x), _flat(y)).reshape(x.shape)


def average3(x, y, w):
    return _average3_flat(_flat(x), _flat(y), _flat(w)).reshape(x.shape)


def w_prox_step(w, g, theta, kappa):
    return _w_prox_step_flat(_flat(w), _flat(g), float(theta), float(kappa)).reshape(w.shape)


def auc_pair_counts(scores_sorted, labels_sorted):
    s = np.ascontiguousarray(scores_sorted, dtype=np.float64)
    y = np.ascontiguousarray(labels_sorted, dtype=np.int64)
    wins, ties = _auc_pair_counts(s, y)
    return int(wins), int(ties)
