"""Per-block sufficient statistics and conjugate marginal likelihoods.

For a block of ``n`` cells the log marginal likelihood log Lambda is

Bernoulli, Beta(eta, eta) prior::

    lgG(2eta) - 2 lgG(eta) + lgG(n1 + eta) + lgG(n - n1 + eta) - lgG(n + 2eta)

Categorical, symmetric Dirichlet(zeta) over C categories::

    lgG(C zeta) - C lgG(zeta) + sum_l lgG(n_l + zeta) - lgG(n + C zeta)

Poisson, Gamma(delta, rate gamma) prior, S = sum y::

    delta log gamma - lgG(delta) + lgG(S + delta) - (S + delta) log(n + gamma) - sum log y!

Gaussian, mu | tau ~ N(xi, 1/(kappa tau)), tau ~ Gamma(gamma/2, rate delta/2)::

    -n/2 log pi + 1/2 log kappa + gamma/2 log delta - 1/2 log(n + kappa)
    + lgG((n + gamma)/2) - lgG(gamma/2)
    - (n + gamma)/2 log(SS + kappa xi^2 - (S + kappa xi)^2 / (n + kappa) + delta)

Everything is evaluated in log space.  An empty block has log Lambda = 0.
The functions here are plain Python and serve as the reference for the
compiled versions used by the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .config import ModelKind, PriorConfig
from .data import BipartiteAdjacency


class BookkeepingError(RuntimeError):
    """A statistic would become negative: a cell was removed that was never added."""


@dataclass(frozen=True)
class BlockStats:
    """Sufficient statistics of one block.

    ``payload`` holds ``(ones,)`` for Bernoulli, ``(n_1, ..., n_{C-1})`` for
    Categorical (category 0 is ``size`` minus the rest), ``(sum, sum log y!)``
    for Poisson and ``(sum, sum y^2)`` for Gaussian.
    """

    model: ModelKind
    size: int
    payload: tuple

    @classmethod
    def empty(cls, model, n_categories=None) -> "BlockStats":
        model = ModelKind.parse(model)
        if model == ModelKind.BERNOULLI:
            width = 1
        elif model == ModelKind.CATEGORICAL:
            if n_categories is None:
                raise ValueError("categorical stats need n_categories")
            width = n_categories - 1
        else:
            width = 2
        return cls(model, 0, (0.0,) * width)

    @classmethod
    def from_values(cls, model, values, n_categories=None) -> "BlockStats":
        s = cls.empty(model, n_categories)
        for v in values:
            s = add_cell(s, v)
        return s

    @property
    def n_categories(self) -> int | None:
        return len(self.payload) + 1 if self.model == ModelKind.CATEGORICAL else None

    def as_array(self) -> np.ndarray:
        return np.array(self.payload, dtype=float)

    def allclose(self, other: "BlockStats", atol=1e-9) -> bool:
        return (self.model == other.model and self.size == other.size
                and np.allclose(self.payload, other.payload, rtol=0, atol=atol))


def _check_value(model, v, n_categories):
    if model == ModelKind.GAUSSIAN:
        if not math.isfinite(v):
            raise ValueError(f"gaussian value must be finite, got {v}")
        return
    if v != int(v) or v < 0:
        raise ValueError(f"value {v} is not a non-negative integer")
    if model == ModelKind.BERNOULLI and v > 1:
        raise ValueError(f"bernoulli value must be 0 or 1, got {v}")
    if model == ModelKind.CATEGORICAL and v > n_categories - 1:
        raise ValueError(f"category {v} out of range 0..{n_categories - 1}")


def _cell_payload(stats: BlockStats, v):
    m = stats.model
    if m == ModelKind.BERNOULLI:
        return (float(v),)
    if m == ModelKind.CATEGORICAL:
        out = [0.0] * len(stats.payload)
        if v > 0:
            out[int(v) - 1] = 1.0
        return tuple(out)
    if m == ModelKind.POISSON:
        return (float(v), math.lgamma(v + 1.0))
    return (float(v), float(v) * float(v))


def add_cell(stats: BlockStats, value) -> BlockStats:
    """Statistics of the block with one more cell holding ``value``."""
    _check_value(stats.model, value, stats.n_categories)
    inc = _cell_payload(stats, value)
    return BlockStats(stats.model, stats.size + 1,
                      tuple(a + b for a, b in zip(stats.payload, inc)))


def remove_cell(stats: BlockStats, value) -> BlockStats:
    """Inverse of :func:`add_cell`."""
    _check_value(stats.model, value, stats.n_categories)
    if stats.size < 1:
        raise BookkeepingError("cannot remove a cell from an empty block")
    inc = _cell_payload(stats, value)
    payload = tuple(a - b for a, b in zip(stats.payload, inc))
    if stats.model != ModelKind.GAUSSIAN:
        if any(p < 0 for p in payload):
            raise BookkeepingError(f"removing {value} drives a count negative: {payload}")
        if stats.model == ModelKind.CATEGORICAL and sum(payload) > stats.size - 1:
            raise BookkeepingError("category counts exceed block size")
        if stats.model == ModelKind.BERNOULLI and payload[0] > stats.size - 1:
            raise BookkeepingError("ones exceed block size")
    return BlockStats(stats.model, stats.size - 1, payload)


def merge_stats(a: BlockStats, b: BlockStats) -> BlockStats:
    """Statistics of the union of two disjoint blocks."""
    if a.model != b.model or len(a.payload) != len(b.payload):
        raise ValueError("cannot merge statistics of different models")
    return BlockStats(a.model, a.size + b.size,
                      tuple(x + y for x, y in zip(a.payload, b.payload)))


def log_block_marginal(stats: BlockStats, prior: PriorConfig) -> float:
    """log Lambda for a block with the given statistics."""
    if stats.model != prior.model:
        raise ValueError(f"statistics are {stats.model.name.lower()} but prior is "
                         f"{prior.model.name.lower()}")
    n = stats.size
    if n == 0:
        return 0.0
    lg = math.lgamma
    m = stats.model
    if m == ModelKind.BERNOULLI:
        e = prior.eta
        n1 = stats.payload[0]
        return lg(2 * e) - 2 * lg(e) + lg(n1 + e) + lg(n - n1 + e) - lg(n + 2 * e)
    if m == ModelKind.CATEGORICAL:
        c = len(stats.payload) + 1
        if c != prior.n_categories:
            raise ValueError("prior and statistics disagree on the number of categories")
        z = prior.zeta
        counts = list(stats.payload) + [n - sum(stats.payload)]
        total = lg(z * c) - c * lg(z)
        for x in counts:
            total += lg(x + z)
        return total - lg(n + z * c)
    if m == ModelKind.POISSON:
        d, g = prior.delta, prior.gamma
        s, lf = stats.payload
        return d * math.log(g) - lg(d) + lg(s + d) - (s + d) * math.log(n + g) - lf
    xi, ka, ga, de = prior.xi, prior.kappa, prior.gamma, prior.delta
    s, ss = stats.payload
    scale = ss + ka * xi * xi - (s + ka * xi) ** 2 / (n + ka) + de
    if scale <= 0:
        raise BookkeepingError(f"non-positive posterior scale {scale}")
    return (-0.5 * n * math.log(math.pi) + 0.5 * math.log(ka) + 0.5 * ga * math.log(de)
            - 0.5 * math.log(n + ka) + lg(0.5 * (n + ga)) - lg(0.5 * ga)
            - 0.5 * (n + ga) * math.log(scale))


def _as_stats(model, size, payload) -> BlockStats:
    return BlockStats(model, int(size), tuple(float(x) for x in payload))


def row_slice_stats(adj: BipartiteAdjacency, row: int, col_labels, G: int | None = None,
                    sparse: bool | None = None) -> list[BlockStats]:
    """Statistics of row ``row`` restricted to each column cluster.

    ``sparse`` picks the path: only the stored non-zeros (True) or every cell
    of the row (False); by default it follows the adjacency's storage.
    """
    col_labels = np.asarray(col_labels, dtype=np.int64)
    if G is None:
        G = int(col_labels.max()) + 1
    if sparse is None:
        sparse = adj.storage == "sparse"
    P = len(BlockStats.empty(adj.model, adj.n_categories).payload)
    out = np.zeros((G, P))
    csr = adj.csr
    data = csr.data.astype(float)
    saux = np.array([math.lgamma(v + 1.0) for v in data]) if adj.model == ModelKind.POISSON \
        else np.zeros_like(data)
    if sparse:
        dense = daux = np.zeros((1, 1))
    else:
        dense = np.ascontiguousarray(adj.dense)
        daux = np.vectorize(lambda v: math.lgamma(v + 1.0))(dense) \
            if adj.model == ModelKind.POISSON else np.zeros_like(dense)
    kern.compute_slice(row, col_labels, G, int(adj.model), dense, daux,
                       csr.indptr.astype(np.int64), csr.indices.astype(np.int64), data, saux,
                       bool(sparse), out)
    sizes = np.bincount(col_labels, minlength=G)
    return [_as_stats(adj.model, sizes[g], out[g]) for g in range(G)]


class StatsTable:
    """K x G grid of :class:`BlockStats` for a partition of a matrix."""

    def __init__(self, grid):
        self.grid = [list(r) for r in grid]

    @classmethod
    def from_partition(cls, adj: BipartiteAdjacency, partition) -> "StatsTable":
        K, G = partition.K, partition.G
        grid = [[BlockStats.empty(adj.model, adj.n_categories) for _ in range(G)]
                for _ in range(K)]
        dense = adj.dense
        for i, k in enumerate(partition.row_labels):
            for j, g in enumerate(partition.col_labels):
                grid[k][g] = add_cell(grid[k][g], dense[i, j])
        return cls(grid)

    @property
    def shape(self):
        return (len(self.grid), len(self.grid[0]) if self.grid else 0)

    def __getitem__(self, kg):
        k, g = kg
        return self.grid[k][g]

    def __setitem__(self, kg, value):
        k, g = kg
        self.grid[k][g] = value

    def merge_rows(self, k: int, k2: int) -> None:
        """Fold row cluster ``k2`` into ``k`` and drop it."""
        self.grid[k] = [merge_stats(a, b) for a, b in zip(self.grid[k], self.grid[k2])]
        del self.grid[k2]

    def log_total(self, prior: PriorConfig) -> float:
        return sum(log_block_marginal(s, prior) for row in self.grid for s in row)

    def allclose(self, other: "StatsTable", atol=1e-9) -> bool:
        return self.shape == other.shape and all(
            a.allclose(b, atol) for ra, rb in zip(self.grid, other.grid) for a, b in zip(ra, rb))
