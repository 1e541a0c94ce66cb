"""Re-ordered adjacency matrix images with cluster boundaries.

Rows are sorted by cluster then index, columns likewise.  Binary data is
drawn black on white; counts and reals use a linear grayscale (dark = large)
clipped at the 99th percentile so a few extreme cells do not wash out the
rest.  Output is SVG, or binary PPM when the path ends in ``.ppm``.
"""

from __future__ import annotations

import base64
import io
from pathlib import Path

import numpy as np

from .config import ModelKind
from .data import BipartiteAdjacency
from .partition import Partition

BOUNDARY_RGB = (220, 30, 30)


def reorder(adj: BipartiteAdjacency, partition: Partition):
    """Permuted dense matrix plus the row/column positions where clusters start."""
    r = np.argsort(partition.row_labels, kind="stable")
    c = np.argsort(partition.col_labels, kind="stable")
    y = adj.dense[np.ix_(r, c)]
    rb = np.flatnonzero(np.diff(partition.row_labels[r])) + 1
    cb = np.flatnonzero(np.diff(partition.col_labels[c])) + 1
    return y, rb, cb


def shade(y: np.ndarray, model) -> np.ndarray:
    """Gray levels in [0, 255], 0 = black."""
    y = np.asarray(y, dtype=float)
    if ModelKind.parse(model) == ModelKind.BERNOULLI:
        return np.where(y > 0, 0, 255).astype(np.uint8)
    lo = min(0.0, float(y.min()))
    hi = float(np.percentile(y, 99))
    if hi <= lo:
        hi = float(y.max())
    if hi <= lo:
        return np.full(y.shape, 255, dtype=np.uint8)
    frac = np.clip((y - lo) / (hi - lo), 0.0, 1.0)
    return np.round(255 * (1.0 - frac)).astype(np.uint8)


def render_heatmap(adj: BipartiteAdjacency, partition: Partition, out) -> Path:
    out = Path(out)
    y, rb, cb = reorder(adj, partition)
    gray = shade(y, adj.model)
    if out.suffix.lower() == ".ppm":
        _write_ppm(gray, rb, cb, out)
    else:
        _write_svg(gray, rb, cb, out)
    return out


def _write_ppm(gray, rb, cb, out):
    n, m = gray.shape
    # cells are drawn as s x s squares; boundaries overwrite the first pixel
    # line of each new cluster once cells are big enough to spare it
    s = int(max(1, min(8, 800 // max(n, m))))
    img = np.repeat(np.repeat(gray, s, axis=0), s, axis=1)
    rgb = np.stack([img] * 3, axis=2)
    for b in rb:
        rgb[b * s, :, :] = BOUNDARY_RGB
    for b in cb:
        rgb[:, b * s, :] = BOUNDARY_RGB
    with open(out, "wb") as fh:
        fh.write(f"P6\n{m * s} {n * s}\n255\n".encode())
        fh.write(np.ascontiguousarray(rgb).tobytes())


def _write_svg(gray, rb, cb, out):
    import matplotlib.image as mpimg

    n, m = gray.shape
    buf = io.BytesIO()
    mpimg.imsave(buf, gray, cmap="gray", vmin=0, vmax=255, format="png")
    href = "data:image/png;base64," + base64.b64encode(buf.getvalue()).decode()
    scale = max(1.0, 800.0 / max(n, m))
    color = "rgb({},{},{})".format(*BOUNDARY_RGB)
    width = max(n, m) / 400.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{m * scale:g}" height="{n * scale:g}" '
        f'viewBox="0 0 {m} {n}">',
        f'<image x="0" y="0" width="{m}" height="{n}" preserveAspectRatio="none" '
        f'style="image-rendering:pixelated" href="{href}"/>',
    ]
    for b in rb:
        parts.append(f'<line x1="0" y1="{b}" x2="{m}" y2="{b}" stroke="{color}" stroke-width="{width:g}"/>')
    for b in cb:
        parts.append(f'<line x1="{b}" y1="0" x2="{b}" y2="{n}" stroke="{color}" stroke-width="{width:g}"/>')
    parts.append("</svg>")
    out.write_text("\n".join(parts) + "\n")


def read_ppm(path) -> np.ndarray:
    """RGB array of a binary PPM written by :func:`render_heatmap`."""
    raw = Path(path).read_bytes()
    header = raw.split(b"\n", 3)
    if header[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(t) for t in header[1].split())
    return np.frombuffer(header[3], dtype=np.uint8).reshape(h, w, 3)
