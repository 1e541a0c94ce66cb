"""Model kinds, hyperparameters and search settings."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np


class ModelKind(enum.IntEnum):
    """Distribution of a single cell value given its block parameter."""

    BERNOULLI = 0
    CATEGORICAL = 1
    POISSON = 2
    GAUSSIAN = 3

    @classmethod
    def parse(cls, name: str | "ModelKind") -> "ModelKind":
        if isinstance(name, ModelKind):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown model kind {name!r}") from None


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters of the label priors and of the block parameter prior.

    ``alpha0``/``beta0`` are the symmetric Dirichlet concentrations for the
    row and column cluster weights.  The remaining fields belong to one model:

    * Bernoulli: ``eta`` (symmetric Beta(eta, eta))
    * Categorical: ``zeta`` (symmetric Dirichlet over ``n_categories``)
    * Poisson: ``delta`` shape, ``gamma`` rate of the Gamma prior on the rate
    * Gaussian: mean ``xi``, precision scale ``kappa``, and a
      Gamma(gamma/2, delta/2) prior on the precision
    """

    model: ModelKind = ModelKind.BERNOULLI
    alpha0: float = 1.0
    beta0: float = 1.0
    eta: float = 1.0
    zeta: float = 1.0
    n_categories: int = 2
    delta: float = 1.0
    gamma: float = 1.0
    xi: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind.parse(self.model))
        positive = ["alpha0", "beta0", "eta", "zeta", "delta", "gamma", "kappa"]
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")
        if not math.isfinite(self.xi):
            raise ValueError("xi must be finite")
        if self.model == ModelKind.CATEGORICAL and self.n_categories < 2:
            raise ValueError("categorical model needs at least 2 categories")

    @property
    def payload_size(self) -> int:
        """Number of sufficient-statistic slots stored per block."""
        if self.model == ModelKind.BERNOULLI:
            return 1
        if self.model == ModelKind.CATEGORICAL:
            return self.n_categories - 1
        return 2

    def hyper_vector(self) -> np.ndarray:
        """Pack the block-prior hyperparameters plus the model's constant term.

        The layout is the one the compiled kernels expect; the last slot is
        the log normalising constant of the prior.
        """
        lg = math.lgamma
        if self.model == ModelKind.BERNOULLI:
            e = self.eta
            return np.array([e, lg(2 * e) - 2 * lg(e)])
        if self.model == ModelKind.CATEGORICAL:
            z, c = self.zeta, self.n_categories
            return np.array([z, float(c), lg(z * c) - c * lg(z)])
        if self.model == ModelKind.POISSON:
            d, g = self.delta, self.gamma
            return np.array([d, g, d * math.log(g) - lg(d)])
        xi, ka, ga, de = self.xi, self.kappa, self.gamma, self.delta
        const = 0.5 * math.log(ka) + 0.5 * ga * math.log(de) - lg(0.5 * ga)
        return np.array([xi, ka, ga, de, const])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.name.lower()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PriorConfig":
        return cls(**d)


@dataclass(frozen=True)
class SearchConfig:
    """Settings of the greedy search.

    ``k_init``/``g_init`` of ``None`` mean ``min(n, 50)`` for that side.
    ``prune_threshold`` is the ICL gap beyond which a candidate cluster is
    dropped for a node; pruning starts after ``prune_warmup_sweeps`` full
    (row + column) sweeps.
    """

    k_init: int | None = None
    g_init: int | None = None
    pruning: bool = False
    sparse_engine: bool = False
    prune_threshold: float = 150.0
    prune_warmup_sweeps: int = 5
    max_sweeps: int = 200
    restarts: int = 1
    rng_seed: int = 0
    merge: bool = True
    threads: int = 1

    def __post_init__(self):
        if self.prune_threshold <= 0:
            raise ValueError("prune_threshold must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        for name in ("k_init", "g_init"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be at least 1")

    @property
    def variant(self) -> str:
        """Label of the pruning/sparsity combination: A0, A1, A2 or A3."""
        return f"A{int(self.sparse_engine) + 2 * int(self.pruning)}"

    @classmethod
    def for_variant(cls, name: str, **kwargs) -> "SearchConfig":
        code = int(name.upper().lstrip("A"))
        if code not in range(4):
            raise ValueError(f"unknown variant {name!r}")
        return cls(sparse_engine=bool(code & 1), pruning=bool(code & 2), **kwargs)

    def resolve_sizes(self, n_rows: int, n_cols: int) -> tuple[int, int]:
        k = self.k_init if self.k_init is not None else min(n_rows, 50)
        g = self.g_init if self.g_init is not None else min(n_cols, 50)
        if k > n_rows or g > n_cols:
            raise ValueError(
                f"initial cluster counts ({k}, {g}) exceed matrix shape ({n_rows}, {n_cols})")
        return k, g

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        return cls(**d)

