"""Normalized mutual information between clusterings."""

from __future__ import annotations

import numpy as np


def confusion_matrix(est, truth) -> np.ndarray:
    """counts[k, l] = number of nodes with estimated label k and true label l."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape != truth.shape or est.ndim != 1:
        raise ValueError(f"label vectors differ in shape: {est.shape} vs {truth.shape}")
    if est.size == 0:
        raise ValueError("empty label vectors")
    _, e = np.unique(est, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    out = np.zeros((e.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(out, (e, t), 1)
    return out


def _entropy(p):
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def nmi(est, truth) -> float:
    """Mutual information divided by the larger of the two entropies.

    Two single-cluster labelings score 1; a single-cluster labeling against
    a non-trivial one scores 0.
    """
    c = confusion_matrix(est, truth)
    n = c.sum()
    p = c / n
    # marginals from integer counts, so a single cluster has probability exactly 1
    pe, pt = c.sum(axis=1) / n, c.sum(axis=0) / n
    he, ht = _entropy(pe), _entropy(pt)
    if he == 0.0 and ht == 0.0:
        return 1.0
    if he == 0.0 or ht == 0.0:
        return 0.0
    nz_per_row = (c > 0).sum(axis=1)
    if c.shape[0] == c.shape[1] and np.all(nz_per_row == 1) and np.all((c > 0).sum(axis=0) == 1):
        return 1.0  # a pure relabeling; skip the rounding in mi / h
    nz = p > 0
    mi = float((p[nz] * np.log(p[nz] / np.outer(pe, pt)[nz])).sum())
    return min(max(mi / max(he, ht), 0.0), 1.0)


def combined_nmi(est_rows, truth_rows, est_cols, truth_cols) -> float:
    """Row NMI plus column NMI, in [0, 2]."""
    return nmi(est_rows, truth_rows) + nmi(est_cols, truth_cols)
