"""How recovery degrades as the planted blocks fade into noise.

Each dataset is 100 x 100 with five row and five column groups; cells in a
diagonal block are 1 with probability 1 - q and off-diagonal cells with
probability q.  At q = 0.5 there is nothing left to find.

    python demos/noise_study.py [reps]
"""

import sys

import numpy as np

from greedyicl import study

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 5
grid = study.parse_grid("0.0125:0.0625:0.5")
rows = study.run_study(grid, reps=reps, restarts=5, seed=0)
for q, mean in zip(*study.mean_by_q(rows)):
    bar = "=" * int(round(mean * 20))
    print(f"q={q:.4f}  combined NMI {mean:.3f}  {bar}")
study.write_csv(rows, "noise_study.csv")
study.plot(rows, "noise_study.png")
sizes = np.array([(r.k, r.g) for r in rows if r.q == grid[0]])
print(f"cluster counts found at q={grid[0]}: {sorted(set(map(tuple, sizes)))}")
