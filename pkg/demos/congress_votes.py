"""Co-cluster the 1984 House votes (435 representatives x 16 bills).

Runs 100 single-start fits to show how the final ICL values spread, then a
best-of-10 fit whose re-ordered matrix is written to congress.svg.

    python demos/congress_votes.py [path/to/congress_votes.csv]
"""

import sys
from pathlib import Path

import numpy as np

from greedyicl import PriorConfig, SearchConfig, fit, fit_once, load_dense, render_heatmap

here = Path(__file__).resolve().parent
path = Path(sys.argv[1]) if len(sys.argv) > 1 else here.parent / "data" / "congress_votes.csv"
votes = load_dense(path, "bernoulli")
prior = PriorConfig()  # alpha0 = beta0 = eta = 1

icls = np.array([fit_once(votes, prior, SearchConfig(), seed=s).icl for s in range(100)])
print(f"100 single runs: best {icls.max():.2f}, median {np.median(icls):.2f}, "
      f"worst {icls.min():.2f}")
hist, edges = np.histogram(icls, bins=10)
for count, lo in zip(hist, edges):
    print(f"  {lo:9.1f}  {'#' * count}")

best = fit(votes, prior, SearchConfig(restarts=10))
print(f"best of 10: ICL {best.icl:.2f}, {best.k} groups of representatives, "
      f"{best.g} groups of bills")
for g in range(best.g):
    bills = np.flatnonzero(best.partition.col_labels == g) + 1
    print(f"  bill group {g + 1}: {bills.tolist()}")
render_heatmap(votes, best.partition, "congress.svg")
print("wrote congress.svg")
