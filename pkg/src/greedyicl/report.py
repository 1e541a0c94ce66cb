"""Fit reports (JSON) and per-sweep trace CSV files."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import PriorConfig, SearchConfig
from .partition import Partition

FORMAT_VERSION = "1"
TIMING_FIELDS = ("wall_time_ms", "restart_times_ms")


@dataclass
class FitReport:
    icl: float
    k: int
    g: int
    row_labels: list  # 1-based
    col_labels: list  # 1-based
    trace: list
    restarts: int
    best_restart: int
    sweeps: int
    moves: int
    merges: int
    wall_time_ms: int
    prior: dict
    search: dict
    restart_icls: list = field(default_factory=list)
    restart_times_ms: list = field(default_factory=list)
    format_version: str = FORMAT_VERSION

    @classmethod
    def from_result(cls, result) -> "FitReport":
        p = result.partition
        return cls(
            icl=float(result.icl), k=p.K, g=p.G,
            row_labels=(p.row_labels + 1).tolist(), col_labels=(p.col_labels + 1).tolist(),
            trace=[float(v) for v in result.trace],
            restarts=result.config.restarts, best_restart=int(result.best_restart),
            sweeps=int(result.sweeps_run), moves=int(result.moves_accepted),
            merges=int(result.merges_accepted),
            wall_time_ms=int(round(sum(result.restart_times or [result.wall_time]) * 1000)),
            prior=result.prior.to_dict(), search=result.config.to_dict(),
            restart_icls=[float(v) for v in result.restart_icls],
            restart_times_ms=[int(round(t * 1000)) for t in result.restart_times],
        )

    @property
    def partition(self) -> Partition:
        return Partition.from_one_based(self.row_labels, self.col_labels)

    @property
    def prior_config(self) -> PriorConfig:
        return PriorConfig.from_dict(self.prior)

    @property
    def search_config(self) -> SearchConfig:
        return SearchConfig.from_dict(self.search)

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> None:
        # one key per line, arrays kept on a single line
        body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in self.to_dict().items())
        with open(path, "w") as fh:
            fh.write("{\n" + body + "\n}\n")

    @classmethod
    def read(cls, path) -> "FitReport":
        with open(path) as fh:
            d = json.load(fh)
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported report format_version {version!r}")
        return cls(**d)

    def without_timing(self) -> dict:
        """Report content minus timings and the execution-only settings
        (engine choice, thread count), which never change the result."""
        d = self.to_dict()
        for key in TIMING_FIELDS:
            d.pop(key)
        d["search"] = {k: v for k, v in d["search"].items()
                       if k not in ("sparse_engine", "threads")}
        return d


def write_trace_csv(history, path) -> None:
    """One row per trace entry: sweep, icl, moves, K, G."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep", "icl", "moves", "K", "G"])
        for step, value, moves, k, g in history:
            w.writerow([step, repr(float(value)), moves, k, g])


def read_trace_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
