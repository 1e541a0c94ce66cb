"""Row/column partitions.

Labels are 0-based in memory (``0..K-1``); files and reports use 1-based
labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def compact_labels(labels) -> np.ndarray:
    """Relabel so the used labels become 0..K-1, keeping their relative order."""
    labels = np.asarray(labels, dtype=np.int64)
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse.astype(np.int64).reshape(labels.shape)


def random_partition(n: int, k: int, rng) -> np.ndarray:
    """Assign ``n`` nodes uniformly at random to ``k`` clusters, then compact.

    The result can use fewer than ``k`` clusters when some draw no node.
    """
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(rng)
    return compact_labels(rng.integers(0, k, size=n))


@dataclass(frozen=True)
class Partition:
    """Row labels ``c`` and column labels ``w`` with their cluster sizes."""

    row_labels: np.ndarray
    col_labels: np.ndarray

    def __post_init__(self):
        for name in ("row_labels", "col_labels"):
            lab = np.asarray(getattr(self, name), dtype=np.int64).copy()
            if lab.ndim != 1 or lab.size == 0:
                raise ValueError(f"{name} must be a non-empty vector")
            used = np.unique(lab)
            if used[0] != 0 or used[-1] != len(used) - 1:
                raise ValueError(f"{name} must use every label in 0..K-1")
            lab.setflags(write=False)
            object.__setattr__(self, name, lab)

    @classmethod
    def from_labels(cls, row_labels, col_labels) -> "Partition":
        """Build from arbitrary integer labels, compacting them first."""
        return cls(compact_labels(row_labels), compact_labels(col_labels))

    @classmethod
    def from_one_based(cls, row_labels, col_labels) -> "Partition":
        return cls(np.asarray(row_labels) - 1, np.asarray(col_labels) - 1)

    @property
    def K(self) -> int:
        return int(self.row_labels.max()) + 1

    @property
    def G(self) -> int:
        return int(self.col_labels.max()) + 1

    @property
    def row_counts(self) -> np.ndarray:
        return np.bincount(self.row_labels, minlength=self.K)

    @property
    def col_counts(self) -> np.ndarray:
        return np.bincount(self.col_labels, minlength=self.G)

    def transpose(self) -> "Partition":
        return Partition(self.col_labels, self.row_labels)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (np.array_equal(self.row_labels, other.row_labels)
                and np.array_equal(self.col_labels, other.col_labels))

    __hash__ = None
