"""Recovery-versus-noise study on the planted-diagonal design."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from .config import PriorConfig, SearchConfig
from .engine import fit
from .metrics import combined_nmi
from .simulation import diagonal_spec, generate

COLUMNS = ("q", "replicate", "nmi", "icl", "k", "g", "seconds")


def parse_grid(text: str) -> np.ndarray:
    """``start:step:end`` inclusive, e.g. ``0.0125:0.0125:0.5`` gives 40 values."""
    try:
        start, step, end = (float(t) for t in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like start:step:end, got {text!r}") from None
    if step <= 0 or end < start:
        raise ValueError(f"empty grid {text!r}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


@dataclass
class StudyRow:
    q: float
    replicate: int
    nmi: float
    icl: float
    k: int
    g: int
    seconds: float


def cell_seed(seed: int, q_index: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, q_index, rep]).generate_state(1)[0])


def run_study(q_values, reps=20, restarts=5, seed=0, n=100, m=100, k=5,
              search: SearchConfig | None = None, progress=None, on_fit=None) -> list[StudyRow]:
    """Generate, fit and score ``reps`` datasets at each noise level ``q``.

    ``progress(row)`` and ``on_fit(row, result)`` are called after each fit.
    """
    prior = PriorConfig()
    base = search or SearchConfig()
    rows = []
    for qi, q in enumerate(q_values):
        for rep in range(reps):
            s = cell_seed(seed, qi, rep)
            adj, tr, tc = generate(diagonal_spec(n, m, k, float(q), seed=s))
            cfg = SearchConfig.from_dict({**base.to_dict(), "restarts": restarts, "rng_seed": s})
            t0 = time.perf_counter()
            res = fit(adj, prior, cfg)
            row = StudyRow(float(q), rep, combined_nmi(res.partition.row_labels, tr,
                                                       res.partition.col_labels, tc),
                           res.icl, res.k, res.g, time.perf_counter() - t0)
            rows.append(row)
            if progress:
                progress(row)
            if on_fit:
                on_fit(row, res)
    return rows


def mean_by_q(rows) -> tuple[np.ndarray, np.ndarray]:
    qs = np.array(sorted({r.q for r in rows}))
    means = np.array([np.mean([r.nmi for r in rows if r.q == q]) for q in qs])
    return qs, means


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([repr(r.q), r.replicate, repr(r.nmi), repr(r.icl), r.k, r.g,
                        f"{r.seconds:.4f}"])


def plot(rows, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    qs, means = mean_by_q(rows)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(qs, means, "o-", ms=3)
    ax.set_xlabel("q")
    ax.set_ylabel("mean combined NMI")
    ax.set_ylim(0, 2.05)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
