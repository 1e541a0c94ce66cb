"""Synthetic bipartite networks from the latent blockmodel.

Row labels are drawn i.i.d. from ``row_weights``, column labels from
``col_weights``, and each cell from the block distribution of its
(row cluster, column cluster) pair.  Labels are not forced to balance, so a
planted cluster can come out empty on small matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ModelKind
from .data import BipartiteAdjacency, DataFormatError


@dataclass(frozen=True)
class GeneratorSpec:
    """Blockmodel parameters.

    ``theta`` is K x G of tie probabilities (Bernoulli) or rates (Poisson),
    K x G x C of category probabilities (Categorical) or K x G x 2 of
    (mean, precision) pairs (Gaussian).
    """

    n: int
    m: int
    row_weights: np.ndarray
    col_weights: np.ndarray
    theta: np.ndarray
    model: ModelKind = ModelKind.BERNOULLI
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind.parse(self.model))
        rw = np.asarray(self.row_weights, dtype=float)
        cw = np.asarray(self.col_weights, dtype=float)
        th = np.asarray(self.theta, dtype=float)
        for name, w in (("row_weights", rw), ("col_weights", cw)):
            if w.ndim != 1 or w.size == 0 or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
                raise ValueError(f"{name} must be a non-negative vector summing to 1")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if th.shape[:2] != (rw.size, cw.size):
            raise ValueError(f"theta has shape {th.shape}, expected {(rw.size, cw.size)} leading")
        m = self.model
        if m == ModelKind.BERNOULLI:
            ok = th.ndim == 2 and np.all((th >= 0) & (th <= 1))
        elif m == ModelKind.POISSON:
            ok = th.ndim == 2 and np.all(th > 0)
        elif m == ModelKind.CATEGORICAL:
            ok = (th.ndim == 3 and th.shape[2] >= 2 and np.all(th >= 0)
                  and np.allclose(th.sum(axis=2), 1, atol=1e-12, rtol=0))
        else:
            ok = th.ndim == 3 and th.shape[2] == 2 and np.all(np.isfinite(th)) and np.all(th[..., 1] > 0)
        if not ok:
            raise ValueError(f"theta is outside the {m.name.lower()} parameter domain")
        object.__setattr__(self, "row_weights", rw)
        object.__setattr__(self, "col_weights", cw)
        object.__setattr__(self, "theta", th)

    @property
    def k(self) -> int:
        return self.row_weights.size

    @property
    def g(self) -> int:
        return self.col_weights.size

    @property
    def n_categories(self) -> int:
        return self.theta.shape[2] if self.model == ModelKind.CATEGORICAL else 2


def diagonal_spec(n: int, m: int, k: int, q: float, seed: int = 0) -> GeneratorSpec:
    """Planted-diagonal Bernoulli design: K = G = k with equal weights,
    tie probability 1 - q inside diagonal blocks and q elsewhere."""
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    theta = np.full((k, k), float(q))
    np.fill_diagonal(theta, 1.0 - q)
    w = np.full(k, 1.0 / k)
    return GeneratorSpec(n, m, w, w.copy(), theta, ModelKind.BERNOULLI, seed)


def generate(spec: GeneratorSpec):
    """Draw ``(adjacency, true_row_labels, true_col_labels)``; labels are 0-based."""
    rng = np.random.default_rng(spec.seed)
    rows = rng.choice(spec.k, size=spec.n, p=spec.row_weights)
    cols = rng.choice(spec.g, size=spec.m, p=spec.col_weights)
    par = spec.theta[rows][:, cols]
    m = spec.model
    if m == ModelKind.BERNOULLI:
        y = (rng.random((spec.n, spec.m)) < par).astype(np.int64)
    elif m == ModelKind.POISSON:
        y = rng.poisson(par)
    elif m == ModelKind.CATEGORICAL:
        cdf = np.cumsum(par, axis=2)
        u = rng.random((spec.n, spec.m, 1))
        y = np.minimum((u >= cdf).sum(axis=2), par.shape[2] - 1)
    else:
        y = rng.normal(par[..., 0], 1.0 / np.sqrt(par[..., 1]))
    adj = BipartiteAdjacency.from_dense(y, m, n_categories=spec.n_categories)
    return adj, rows.astype(np.int64), cols.astype(np.int64)


def write_truth(path, row_labels, col_labels) -> None:
    """Label sidecar: two lines of 1-based labels, rows then columns."""
    with open(path, "w") as fh:
        fh.write(" ".join(str(int(v) + 1) for v in row_labels) + "\n")
        fh.write(" ".join(str(int(v) + 1) for v in col_labels) + "\n")


def read_truth(path):
    """Inverse of :func:`write_truth`; returns 0-based label arrays."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise DataFormatError(f"expected 2 label lines, found {len(lines)}", path=str(path))
    out = []
    for lineno, ln in enumerate(lines, 1):
        try:
            lab = np.array([int(t) for t in ln.split()], dtype=np.int64)
        except ValueError:
            raise DataFormatError("labels must be integers", path=str(path), line=lineno) from None
        if lab.min() < 1:
            raise DataFormatError("labels are 1-based", path=str(path), line=lineno)
        out.append(lab - 1)
    return out[0], out[1]


def read_theta(path) -> np.ndarray:
    """Whitespace-separated K x G grid, one row cluster per line (Bernoulli/Poisson)."""
    rows = []
    for lineno, ln in enumerate(Path(path).read_text().splitlines(), 1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        try:
            rows.append([float(t) for t in ln.replace(",", " ").split()])
        except ValueError:
            raise DataFormatError("non-numeric theta entry", path=str(path), line=lineno) from None
        if len(rows[-1]) != len(rows[0]):
            raise DataFormatError("ragged theta grid", path=str(path), line=lineno)
    if not rows:
        raise DataFormatError("empty theta file", path=str(path))
    return np.array(rows)
