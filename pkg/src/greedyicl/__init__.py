"""Greedy exact-ICL co-clustering of bipartite networks with the latent blockmodel."""

from .blocks import (BlockStats, BookkeepingError, StatsTable, add_cell, log_block_marginal,
                     merge_stats, remove_cell, row_slice_stats)
from .config import ModelKind, PriorConfig, SearchConfig
from .data import (BipartiteAdjacency, DataFormatError, load, load_dense, load_sparse,
                   save_dense, save_sparse)
from .engine import FitResult, PruneTable, fit, fit_once, merge_pass, sweep_cols, sweep_rows
from .heatmap import render_heatmap
from .icl import IclState, icl, log_label_prior, softmax_deltas
from .metrics import combined_nmi, confusion_matrix, nmi
from .partition import Partition, compact_labels, random_partition
from .report import FitReport, read_trace_csv, write_trace_csv
from .simulation import GeneratorSpec, diagonal_spec, generate, read_truth, write_truth

__version__ = "0.1.0"
