"""Greedy exact-ICL search.

A run starts from a random partition with many clusters and alternates
label sweeps over the row nodes and the column nodes.  In a sweep every node,
visited in a fresh random order, moves to the cluster giving the largest ICL
gain (clusters that lose their last node disappear).  Once a full sweep
changes nothing, pairwise cluster merges are tried; accepted merges send the
search back to sweeping.  The run stops when neither sweeps nor merges
improve the ICL.

Optional pruning: after a warm-up, a node permanently stops considering any
cluster whose gain trails the best one by more than ``prune_threshold``.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .config import PriorConfig, SearchConfig
from .data import BipartiteAdjacency
from .icl import IclState
from .partition import Partition, random_partition

# Gains at or below this are treated as no improvement (floating-point noise).
ACCEPT_EPS = 1e-9


@dataclass
class PruneTable:
    """Candidate clusters still considered for each row and column node."""

    row_allowed: np.ndarray
    col_allowed: np.ndarray
    threshold: float = 150.0
    active: bool = False

    @classmethod
    def for_state(cls, state: IclState, threshold=150.0) -> "PruneTable":
        # Shares the state's arrays: cluster deletions shift their columns.
        return cls(state.row_allowed, state.col_allowed, threshold)

    def reset(self):
        self.row_allowed[:] = True
        self.col_allowed[:] = True
        self.active = False

    def allowed(self, axis):
        return self.row_allowed if axis == 0 else self.col_allowed


@dataclass
class SweepStats:
    moves: int = 0
    merges: int = 0
    min_gain: float = np.inf

    def record(self, gains):
        if len(gains):
            self.min_gain = min(self.min_gain, float(np.min(gains)))


@dataclass
class FitResult:
    """Outcome of one or more greedy runs.

    ``history`` has one ``(step, icl, moves, K, G)`` row for the initial
    state, for each full row+column sweep and for each merge pass that
    merged something; ``trace`` is its ICL column.
    """

    partition: Partition
    icl: float
    history: list
    sweeps_run: int
    moves_accepted: int
    merges_accepted: int
    wall_time: float
    seed: int
    config: SearchConfig
    prior: PriorConfig
    hit_max_sweeps: bool = False
    min_step_gain: float = float("inf")
    restart_icls: list = field(default_factory=list)
    restart_times: list = field(default_factory=list)
    best_restart: int = 0
    restart_results: list = field(default_factory=list, repr=False)  # every run, in seed order

    @property
    def k(self) -> int:
        return self.partition.K

    @property
    def g(self) -> int:
        return self.partition.G

    @property
    def trace(self) -> list:
        return [row[1] for row in self.history]


def _sweep(state: IclState, axis: int, prune: PruneTable | None, rng, stats: SweepStats):
    s = state._side(axis)
    n = s.la.shape[0]
    order = rng.permutation(n).astype(np.int64)
    gains = np.empty(n)
    allowed = prune.allowed(axis) if prune is not None else s.allowed_full
    active = bool(prune is not None and prune.active)
    threshold = prune.threshold if prune is not None else np.inf
    n_moves = kern.sweep(order, state.nk, s.ia, s.ib, s.la, s.ca, s.lb, s.cb, s.stats, s.logl,
                         *state._data_args(s), *state._model_args(), s.ptab, s.ktab,
                         s.slice_buf, s.cand, allowed, active, threshold, ACCEPT_EPS, gains)
    for d in gains[:n_moves]:
        state.icl += d
    stats.moves += n_moves
    stats.record(gains[:n_moves])
    state._note_moves(n_moves)
    return n_moves


def sweep_rows(state: IclState, prune: PruneTable | None, rng, stats: SweepStats | None = None) -> int:
    """Visit every row node once in random order; return the number of moves."""
    return _sweep(state, 0, prune, np.random.default_rng(rng), stats or SweepStats())


def sweep_cols(state: IclState, prune: PruneTable | None, rng, stats: SweepStats | None = None) -> int:
    """Column counterpart of :func:`sweep_rows`."""
    return _sweep(state, 1, prune, np.random.default_rng(rng), stats or SweepStats())


def merge_pass(state: IclState, stats: SweepStats | None = None) -> int:
    """Apply the best positive row or column merge until none is left."""
    stats = stats or SweepStats()
    n = 0
    while True:
        dr, k, k2 = state.best_merge(0)
        dc, g, g2 = state.best_merge(1)
        if max(dr, dc) <= ACCEPT_EPS:
            break
        if dr >= dc:
            state.apply_merge_rows(k, k2)
            stats.record([dr])
        else:
            state.apply_merge_cols(g, g2)
            stats.record([dc])
        n += 1
    stats.merges += n
    return n


def fit_once(adj: BipartiteAdjacency, prior: PriorConfig, config: SearchConfig | None = None,
             seed: int | None = None, init: Partition | None = None) -> FitResult:
    """One greedy run from a random (or given) initial partition."""
    config = config or SearchConfig()
    seed = config.rng_seed if seed is None else seed
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    if init is None:
        k0, g0 = config.resolve_sizes(adj.n_rows, adj.n_cols)
        init = Partition(random_partition(adj.n_rows, k0, rng),
                         random_partition(adj.n_cols, g0, rng))
    state = IclState(adj, prior, init, sparse=config.sparse_engine)
    prune = PruneTable.for_state(state, config.prune_threshold)
    stats = SweepStats()
    history = [(0, state.icl, 0, state.K, state.G)]
    sweeps = 0
    hit_cap = False
    while True:
        while True:
            if sweeps >= config.max_sweeps:
                hit_cap = True
                break
            prune.active = config.pruning and sweeps >= config.prune_warmup_sweeps
            moved = _sweep(state, 0, prune, rng, stats) + _sweep(state, 1, prune, rng, stats)
            sweeps += 1
            history.append((sweeps, state.icl, moved, state.K, state.G))
            if moved == 0:
                break
        if not config.merge:
            break
        merged = merge_pass(state, stats)
        if merged:
            history.append((sweeps, state.icl, merged, state.K, state.G))
        if merged == 0 or hit_cap:
            break
    return FitResult(
        partition=state.partition, icl=float(state.icl), history=history, sweeps_run=sweeps,
        moves_accepted=stats.moves, merges_accepted=stats.merges,
        wall_time=time.perf_counter() - t0, seed=int(seed), config=config, prior=prior,
        hit_max_sweeps=hit_cap, min_step_gain=stats.min_gain)


def fit(adj: BipartiteAdjacency, prior: PriorConfig, config: SearchConfig | None = None) -> FitResult:
    """Best of ``config.restarts`` runs seeded ``rng_seed, rng_seed + 1, ...``.

    Ties on ICL go to the lowest seed, so the answer does not depend on how
    many threads run the restarts.
    """
    config = config or SearchConfig()
    seeds = [config.rng_seed + r for r in range(config.restarts)]
    if config.threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda s: fit_once(adj, prior, config, s), seeds))
    else:
        results = [fit_once(adj, prior, config, s) for s in seeds]
    icls = [r.icl for r in results]
    best = int(np.argmax(icls))  # first maximum = lowest seed
    out = results[best]
    out.restart_icls = icls
    out.restart_times = [r.wall_time for r in results]
    out.best_restart = best
    out.restart_results = results
    return out
