"""Bipartite adjacency matrices and their on-disk formats.

Two text formats are read and written:

* dense CSV: one line per row node, comma separated, optional header line
  (detected by a non-numeric first line);
* sparse triplets: a header ``N M nnz`` followed by ``nnz`` lines ``i j v``
  with 1-based indices.  A MatrixMarket ``coordinate`` banner and ``%``
  comment lines are accepted in front of the header.

Cells that are not stored in a sparse file hold the value 0.
"""

from __future__ import annotations

import csv
import math
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .config import ModelKind


class DataFormatError(ValueError):
    """Malformed input file or value outside the model's domain."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


def _check_values(values, model, n_categories, coords=None):
    """Raise DataFormatError at the first value outside the model's domain."""
    values = np.asarray(values, dtype=float)
    if model == ModelKind.GAUSSIAN:
        bad = ~np.isfinite(values)
        what = "finite real"
    else:
        integral = np.isfinite(values) & (values == np.round(values))
        if model == ModelKind.BERNOULLI:
            bad = ~(integral & ((values == 0) | (values == 1)))
            what = "0 or 1"
        elif model == ModelKind.CATEGORICAL:
            bad = ~(integral & (values >= 0) & (values <= n_categories - 1))
            what = f"an integer in 0..{n_categories - 1}"
        else:
            bad = ~(integral & (values >= 0))
            what = "a non-negative integer"
    if bad.any():
        idx = int(np.flatnonzero(bad.ravel())[0])
        if coords is None:
            r, c = np.unravel_index(idx, values.shape)
        else:
            r, c = coords[0][idx], coords[1][idx]
        raise DataFormatError(
            f"value {values.ravel()[idx].item():g} at row {r + 1}, column {c + 1} is not {what} "
            f"({model.name.lower()} model)")


class BipartiteAdjacency:
    """An N x M matrix of linking attributes between row and column nodes.

    Build one with :meth:`from_dense` or :meth:`from_triplets`; the object is
    read-only afterwards.  Both backings expose the same views
    (:attr:`dense`, :attr:`csr`, :attr:`csc`), materialised on first use.
    """

    def __init__(self, n_rows, n_cols, model, n_categories=None, *,
                 dense=None, rows=None, cols=None, values=None):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.model = ModelKind.parse(model)
        if self.model == ModelKind.CATEGORICAL:
            if n_categories is None or n_categories < 2:
                raise ValueError("categorical adjacency needs n_categories >= 2")
            self.n_categories = int(n_categories)
        else:
            self.n_categories = None
        if dense is not None:
            self.storage = "dense"
            self._dense = dense
        else:
            self.storage = "sparse"
            self._triplets = (rows, cols, values)

    @classmethod
    def from_dense(cls, matrix, model, n_categories=None):
        a = np.array(matrix, dtype=float, copy=True)
        if a.ndim != 2:
            raise ValueError("dense adjacency must be two-dimensional")
        model = ModelKind.parse(model)
        _check_values(a, model, n_categories)
        a.setflags(write=False)
        return cls(a.shape[0], a.shape[1], model, n_categories, dense=a)

    @classmethod
    def from_triplets(cls, n_rows, n_cols, rows, cols, values, model, n_categories=None):
        """Sparse backing from 0-based (row, col, value) triplets of non-zero cells."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if not (len(rows) == len(cols) == len(values)):
            raise ValueError("triplet arrays must have equal length")
        model = ModelKind.parse(model)
        if len(rows):
            if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
                raise DataFormatError("triplet index out of range")
        if np.any(values == 0):
            k = int(np.flatnonzero(values == 0)[0])
            raise DataFormatError(
                f"explicit zero stored at row {rows[k] + 1}, column {cols[k] + 1}")
        _check_values(values, model, n_categories, coords=(rows, cols))
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
        if dup.any():
            k = int(np.flatnonzero(dup)[0])
            raise DataFormatError(f"duplicate entry at row {rows[k] + 1}, column {cols[k] + 1}")
        for arr in (rows, cols, values):
            arr.setflags(write=False)
        return cls(n_rows, n_cols, model, n_categories, rows=rows, cols=cols, values=values)

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @cached_property
    def dense(self) -> np.ndarray:
        if self.storage == "dense":
            return self._dense
        r, c, v = self._triplets
        a = np.zeros(self.shape)
        a[r, c] = v
        a.setflags(write=False)
        return a

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Row-compressed view holding only the non-zero cells, indices sorted."""
        if self.storage == "dense":
            m = sp.csr_matrix(self._dense)
        else:
            r, c, v = self._triplets
            m = sp.csr_matrix((v, (r, c)), shape=self.shape)
        m.eliminate_zeros()
        m.sort_indices()
        return m

    @cached_property
    def csc(self) -> sp.csr_matrix:
        """Row-compressed view of the transpose (one row per column node)."""
        m = self.csr.T.tocsr()
        m.sort_indices()
        return m

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    @property
    def density(self) -> float:
        return self.nnz / float(self.n_rows * self.n_cols)

    def triplets(self):
        """0-based (rows, cols, values) of the non-zero cells in row-major order."""
        m = self.csr.tocoo()
        return m.row.astype(np.int64), m.col.astype(np.int64), m.data.copy()

    def transpose(self) -> "BipartiteAdjacency":
        r, c, v = self.triplets()
        return BipartiteAdjacency.from_triplets(
            self.n_cols, self.n_rows, c, r, v, self.model, self.n_categories)

    def with_storage(self, storage: str) -> "BipartiteAdjacency":
        if storage == self.storage:
            return self
        if storage == "dense":
            return BipartiteAdjacency.from_dense(self.dense, self.model, self.n_categories)
        if storage == "sparse":
            return BipartiteAdjacency.from_triplets(
                self.n_rows, self.n_cols, *self.triplets(), self.model, self.n_categories)
        raise ValueError(f"unknown storage {storage!r}")

    def __eq__(self, other):
        if not isinstance(other, BipartiteAdjacency):
            return NotImplemented
        return (self.shape == other.shape and self.model == other.model
                and self.n_categories == other.n_categories
                and np.array_equal(self.dense, other.dense))

    __hash__ = None

    def __repr__(self):
        return (f"BipartiteAdjacency({self.n_rows}x{self.n_cols}, {self.model.name.lower()}, "
                f"{self.storage}, nnz={self.nnz})")


def _parse_number(token, path, line):
    try:
        x = float(token)
    except ValueError:
        raise DataFormatError(f"cannot parse {token!r} as a number", path, line) from None
    if math.isnan(x):
        raise DataFormatError("NaN is not a valid cell value", path, line)
    return x


def load_dense(path, model, n_categories=None) -> BipartiteAdjacency:
    """Read a comma-separated matrix, one row node per line."""
    model = ModelKind.parse(model)
    rows = []
    width = None
    first_data_line = None
    with open(path, newline="") as f:
        for lineno, record in enumerate(csv.reader(f), start=1):
            if not record or all(not t.strip() for t in record):
                continue
            if first_data_line is None and not rows:
                try:
                    [float(t) for t in record]
                except ValueError:
                    first_data_line = lineno + 1
                    continue  # header
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise DataFormatError(
                    f"row has {len(record)} columns, expected {width}", path, lineno)
            rows.append([_parse_number(t.strip(), path, lineno) for t in record])
    if not rows:
        raise DataFormatError("no data rows", path)
    try:
        return BipartiteAdjacency.from_dense(np.array(rows), model, n_categories)
    except DataFormatError as e:
        raise DataFormatError(str(e), path) from None


def load_sparse(path, model, n_categories=None) -> BipartiteAdjacency:
    """Read a triplet file (``N M nnz`` header, then ``i j v`` lines, 1-based)."""
    model = ModelKind.parse(model)
    header = None
    rows, cols, vals = [], [], []
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("%"):
                if lineno == 1 and line.lower().startswith("%%matrixmarket"):
                    parts = line.lower().split()
                    if len(parts) < 3 or parts[2] != "coordinate":
                        raise DataFormatError(
                            "only MatrixMarket coordinate files are supported", path, lineno)
                continue
            tokens = line.split()
            if header is None:
                if len(tokens) != 3:
                    raise DataFormatError("expected header 'N M nnz'", path, lineno)
                try:
                    header = tuple(int(t) for t in tokens)
                except ValueError:
                    raise DataFormatError("header must hold three integers", path, lineno) from None
                continue
            if len(tokens) != 3:
                raise DataFormatError(f"expected 'i j v', got {line!r}", path, lineno)
            try:
                i, j = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise DataFormatError("row/column index must be an integer", path, lineno) from None
            v = _parse_number(tokens[2], path, lineno)
            if not (1 <= i <= header[0] and 1 <= j <= header[1]):
                raise DataFormatError(f"index ({i}, {j}) out of range", path, lineno)
            if v == 0:
                raise DataFormatError(
                    f"explicit zero at ({i}, {j}); zeros must be left implicit", path, lineno)
            rows.append(i - 1)
            cols.append(j - 1)
            vals.append(v)
    if header is None:
        raise DataFormatError("missing 'N M nnz' header", path)
    n, m, nnz = header
    if len(vals) != nnz:
        raise DataFormatError(f"header announces {nnz} entries, found {len(vals)}", path)
    try:
        return BipartiteAdjacency.from_triplets(n, m, rows, cols, vals, model, n_categories)
    except DataFormatError as e:
        raise DataFormatError(str(e), path) from None


def _fmt(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def save_dense(adj: BipartiteAdjacency, path) -> None:
    with open(path, "w") as f:
        for row in adj.dense:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def save_sparse(adj: BipartiteAdjacency, path) -> None:
    r, c, v = adj.triplets()
    with open(path, "w") as f:
        f.write(f"{adj.n_rows} {adj.n_cols} {len(v)}\n")
        for i, j, x in zip(r, c, v):
            f.write(f"{i + 1} {j + 1} {_fmt(x)}\n")


def load(path, model, fmt=None, n_categories=None) -> BipartiteAdjacency:
    """Dispatch on ``fmt`` ('dense' or 'sparse'); guessed from the suffix if None."""
    if fmt is None:
        fmt = "dense" if Path(path).suffix.lower() == ".csv" else "sparse"
    if fmt == "dense":
        return load_dense(path, model, n_categories)
    if fmt == "sparse":
        return load_sparse(path, model, n_categories)
    raise ValueError(f"unknown format {fmt!r}")
