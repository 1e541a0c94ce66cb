"""Exact ICL of a co-clustering and its incremental changes.

    ICL(K, G, c, w) = log pi(c, w | K, G) + sum_{k,g} log Lambda_kg

with Dirichlet-multinomial label terms and conjugate block marginals
(see :mod:`greedyicl.blocks`).  :class:`IclState` caches the block
statistics and marginals so that single-node moves and cluster merges are
scored in O(G) (resp. O(K)) marginal evaluations.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from . import _kernels as kern
from .config import ModelKind, PriorConfig
from .data import BipartiteAdjacency
from .partition import Partition

# Cached ICL is recomputed from scratch after this many accepted moves.
REANCHOR_EVERY = 1000


def _dirichlet_multinomial(counts, alpha):
    counts = np.asarray(counts, dtype=float)
    k = len(counts)
    n = counts.sum()
    return float(math.lgamma(alpha * k) - k * math.lgamma(alpha)
                 + gammaln(counts + alpha).sum() - math.lgamma(n + alpha * k))


def log_label_prior(partition: Partition, alpha0: float, beta0: float) -> float:
    """log pi(c, w | K, G) under symmetric Dirichlet priors on the cluster weights."""
    return (_dirichlet_multinomial(partition.row_counts, alpha0)
            + _dirichlet_multinomial(partition.col_counts, beta0))


def _prior_tables(n, alpha, kcap):
    ptab = gammaln(np.arange(n + 1) + alpha)
    ks = np.arange(kcap + 1, dtype=float)
    with np.errstate(divide="ignore"):
        ktab = gammaln(alpha * ks) - gammaln(n + alpha * ks)
    ktab[0] = 0.0
    return ptab, ktab


def _poisson_aux(values):
    return gammaln(np.asarray(values, dtype=float) + 1.0)


class _Side:
    """Argument bundle for the kernels, for either rows (axis 0) or columns (axis 1)."""

    __slots__ = ("ia", "ib", "la", "ca", "lb", "cb", "stats", "logl", "dense", "daux",
                 "indptr", "indices", "data", "saux", "ptab", "ktab", "slice_buf",
                 "cand", "allowed_full")


class IclState:
    """Partition plus cached block statistics, marginals and ICL.

    Parameters
    ----------
    adj : BipartiteAdjacency
    prior : PriorConfig
        Must match ``adj.model`` (and its number of categories).
    partition : Partition
    sparse : bool
        Compute node slices from the stored non-zeros only (sparse engine)
        instead of scanning full rows/columns.  Results are identical.
    """

    def __init__(self, adj: BipartiteAdjacency, prior: PriorConfig, partition: Partition,
                 sparse: bool = False):
        if prior.model != adj.model:
            raise ValueError(f"prior is for {prior.model.name.lower()} but data is "
                             f"{adj.model.name.lower()}")
        if adj.model == ModelKind.CATEGORICAL and prior.n_categories != adj.n_categories:
            raise ValueError("prior and data disagree on the number of categories")
        if partition.row_labels.shape[0] != adj.n_rows or partition.col_labels.shape[0] != adj.n_cols:
            raise ValueError("partition does not match the matrix shape")
        self.adj = adj
        self.prior = prior
        self.sparse = bool(sparse)
        self.model = int(adj.model)
        self.hp = prior.hyper_vector()
        n, m = adj.shape
        kcap, gcap = partition.K, partition.G
        self.row_labels = partition.row_labels.copy()
        self.col_labels = partition.col_labels.copy()
        self.row_counts = np.zeros(kcap, dtype=np.int64)
        self.col_counts = np.zeros(gcap, dtype=np.int64)
        self.row_counts[:] = partition.row_counts
        self.col_counts[:] = partition.col_counts
        self.nk = np.array([kcap, gcap], dtype=np.int64)
        P = prior.payload_size
        self.stats = np.zeros((kcap, gcap, P))
        self.logl = np.zeros((kcap, gcap))

        max_count = 0
        if adj.model == ModelKind.POISSON:
            max_count = int(adj.csr.data.sum())
        self.tc, self.ts = kern.build_tables(self.model, self.hp, max_count, n * m)
        self.row_ptab, self.row_ktab = _prior_tables(n, prior.alpha0, kcap)
        self.col_ptab, self.col_ktab = _prior_tables(m, prior.beta0, gcap)
        self.row_allowed = np.ones((n, kcap), dtype=np.bool_)
        self.col_allowed = np.ones((m, gcap), dtype=np.bool_)
        self._sides = {0: self._make_side(0), 1: self._make_side(1)}
        self.moves_since_anchor = 0
        self.reanchor()

    # ------------------------------------------------------------------
    def _make_side(self, axis):
        adj = self.adj
        s = _Side()
        poisson = adj.model == ModelKind.POISSON
        if axis == 0:
            s.ia, s.ib = 0, 1
            s.la, s.ca, s.lb, s.cb = self.row_labels, self.row_counts, self.col_labels, self.col_counts
            s.stats, s.logl = self.stats, self.logl
            mat = adj.csr
            dense_src = adj.dense
            s.ptab, s.ktab = self.row_ptab, self.row_ktab
            s.allowed_full = self.row_allowed
        else:
            s.ia, s.ib = 1, 0
            s.la, s.ca, s.lb, s.cb = self.col_labels, self.col_counts, self.row_labels, self.row_counts
            s.stats, s.logl = self.stats.transpose(1, 0, 2), self.logl.T
            mat = adj.csc
            dense_src = adj.dense.T
            s.ptab, s.ktab = self.col_ptab, self.col_ktab
            s.allowed_full = self.col_allowed
        s.indptr = mat.indptr.astype(np.int64)
        s.indices = mat.indices.astype(np.int64)
        s.data = mat.data.astype(float)
        s.saux = _poisson_aux(s.data) if poisson else np.zeros_like(s.data)
        if self.sparse:
            s.dense = np.zeros((1, 1))
            s.daux = np.zeros((1, 1))
        else:
            s.dense = np.ascontiguousarray(dense_src, dtype=float)
            s.daux = _poisson_aux(s.dense) if poisson else np.zeros_like(s.dense)
        kb_cap = self.stats.shape[1 - axis]
        s.slice_buf = np.zeros((kb_cap, self.stats.shape[2]))
        s.cand = np.zeros(self.stats.shape[axis])
        return s

    def _side(self, axis):
        return self._sides[axis]

    def _data_args(self, s):
        return (s.dense, s.daux, s.indptr, s.indices, s.data, s.saux, self.sparse)

    def _model_args(self):
        return (self.model, self.hp, self.tc, self.ts)

    # ------------------------------------------------------------------
    @property
    def K(self) -> int:
        return int(self.nk[0])

    @property
    def G(self) -> int:
        return int(self.nk[1])

    @property
    def partition(self) -> Partition:
        return Partition(self.row_labels.copy(), self.col_labels.copy())

    def block_totals(self):
        return self.logl[: self.K, : self.G]

    def log_label_prior(self) -> float:
        K, G = self.K, self.G
        rows = (self.row_ptab[self.row_counts[:K]] - self.row_ptab[0]).sum() + self.row_ktab[K]
        cols = (self.col_ptab[self.col_counts[:G]] - self.col_ptab[0]).sum() + self.col_ktab[G]
        return float(rows + cols)

    def log_block_total(self) -> float:
        return float(self.block_totals().sum())

    def recompute_icl(self) -> float:
        """ICL from the cached block marginals, ignoring the running total."""
        return self.log_label_prior() + self.log_block_total()

    def reanchor(self):
        """Rebuild statistics, marginals and ICL from the labels and the data."""
        s = self._side(0)
        kern.build_stats(s.la, s.lb, self.K, self.G, self.model, *self._data_args(s),
                         self.stats, s.slice_buf)
        kern.refresh_logl(self.K, self.G, self.row_counts, self.col_counts, self.stats,
                          self.logl, *self._model_args())
        self.icl = self.recompute_icl()
        self.moves_since_anchor = 0

    def _note_moves(self, n):
        self.moves_since_anchor += n
        if self.moves_since_anchor >= REANCHOR_EVERY:
            self.reanchor()

    # ------------------------------------------------------------------
    def _delta(self, axis, i, l):
        s = self._side(axis)
        K = int(self.nk[s.ia])
        if not 0 <= l < K:
            raise IndexError(f"target cluster {l} out of range 0..{K - 1}")
        return float(kern.delta_move(i, l, self.nk, s.ia, s.ib, s.la, s.ca, s.lb, s.cb,
                                     s.stats, s.logl, *self._data_args(s),
                                     *self._model_args(), s.ptab, s.ktab, s.slice_buf))

    def delta_row_move(self, i: int, l: int) -> float:
        """ICL change of moving row node ``i`` to row cluster ``l``.

        If ``i`` is alone in its cluster the move deletes that cluster and the
        change is measured against the (K-1)-cluster ICL.
        """
        return self._delta(0, i, l)

    def delta_col_move(self, j: int, h: int) -> float:
        return self._delta(1, j, h)

    def _apply(self, axis, i, l):
        d = self._delta(axis, i, l)
        s = self._side(axis)
        kern.apply_move(i, l, self.nk, s.ia, s.ib, s.la, s.ca, s.lb, s.cb, s.stats, s.logl,
                        *self._data_args(s), *self._model_args(), s.slice_buf, s.allowed_full)
        self.icl += d
        if d != 0.0:
            self._note_moves(1)
        return d

    def apply_row_move(self, i: int, l: int) -> float:
        """Move row node ``i`` to cluster ``l``; returns the ICL change applied."""
        return self._apply(0, i, l)

    def apply_col_move(self, j: int, h: int) -> float:
        return self._apply(1, j, h)

    def _all_deltas(self, axis, i):
        s = self._side(axis)
        out = np.zeros(int(self.nk[s.ia]))
        kern.all_deltas(i, self.nk, s.ia, s.ib, s.la, s.ca, s.lb, s.cb, s.stats, s.logl,
                        *self._data_args(s), *self._model_args(), s.ptab, s.ktab,
                        s.slice_buf, out)
        return out

    def row_deltas(self, i: int) -> np.ndarray:
        """ICL change for moving row node ``i`` to each row cluster (0 for its own)."""
        return self._all_deltas(0, i)

    def col_deltas(self, j: int) -> np.ndarray:
        return self._all_deltas(1, j)

    # ------------------------------------------------------------------
    def _merge_delta(self, axis, k, k2):
        s = self._side(axis)
        K = int(self.nk[s.ia])
        if k == k2:
            raise ValueError("cannot merge a cluster with itself")
        if not (0 <= k < K and 0 <= k2 < K):
            raise IndexError("cluster index out of range")
        k, k2 = min(k, k2), max(k, k2)  # the merged partition is the same either way
        return float(kern.merge_delta(k, k2, self.nk, s.ia, s.ib, s.ca, s.cb, s.stats,
                                      s.logl, *self._model_args(), s.ptab, s.ktab))

    def delta_merge_rows(self, k: int, k2: int) -> float:
        """ICL change of merging row clusters ``k`` and ``k2``."""
        return self._merge_delta(0, k, k2)

    def delta_merge_cols(self, g: int, g2: int) -> float:
        return self._merge_delta(1, g, g2)

    def _apply_merge(self, axis, k, k2):
        d = self._merge_delta(axis, k, k2)
        s = self._side(axis)
        kern.apply_merge(k, k2, self.nk, s.ia, s.ib, s.la, s.ca, s.cb, s.stats, s.logl,
                         s.allowed_full, *self._model_args())
        self.icl += d
        return d

    def apply_merge_rows(self, k: int, k2: int) -> float:
        """Merge row cluster ``max(k, k2)`` into ``min(k, k2)``; returns the ICL change."""
        return self._apply_merge(0, k, k2)

    def apply_merge_cols(self, g: int, g2: int) -> float:
        return self._apply_merge(1, g, g2)

    def best_merge(self, axis):
        s = self._side(axis)
        if self.nk[s.ia] < 2:
            return -np.inf, -1, -1
        d, k, k2 = kern.best_merge(self.nk, s.ia, s.ib, s.ca, s.cb, s.stats, s.logl,
                                   *self._model_args(), s.ptab, s.ktab)
        return float(d), int(k), int(k2)

    # ------------------------------------------------------------------
    def gibbs_full_conditional(self, i: int, axis: int = 0) -> np.ndarray:
        """Full conditional of node ``i``'s label given everything else.

        Softmax of the move gains; diagnostic only, the search never samples.
        """
        return softmax_deltas(self._all_deltas(axis, i))

    def copy(self) -> "IclState":
        new = IclState(self.adj, self.prior, self.partition, sparse=self.sparse)
        new.icl = self.icl
        return new


def softmax_deltas(deltas) -> np.ndarray:
    d = np.asarray(deltas, dtype=float)
    e = np.exp(d - d.max())
    return e / e.sum()


def icl(adj: BipartiteAdjacency, prior: PriorConfig, partition: Partition,
        sparse: bool = False) -> float:
    """Exact ICL of ``partition`` evaluated from scratch."""
    return IclState(adj, prior, partition, sparse=sparse).icl
