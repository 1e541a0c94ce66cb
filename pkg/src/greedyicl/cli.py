"""Command line: ``greedyicl {fit,simulate,evaluate,study}``.

Exit status 0 on success, 1 on bad input files or values, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ModelKind, PriorConfig, SearchConfig
from .data import DataFormatError, load, save_dense, save_sparse
from .engine import fit
from .heatmap import render_heatmap
from .metrics import combined_nmi
from .report import FitReport, write_trace_csv
from .simulation import (GeneratorSpec, diagonal_spec, generate, read_theta, read_truth,
                         write_truth)
from . import study

MODELS = [m.name.lower() for m in ModelKind]


class InputError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="greedyicl", description="Greedy exact-ICL co-clustering.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="cluster the rows and columns of a matrix")
    f.add_argument("--input", required=True)
    f.add_argument("--format", choices=["dense", "sparse"])
    f.add_argument("--model", choices=MODELS, default="bernoulli")
    f.add_argument("--categories", type=int)
    f.add_argument("--kmax", type=int, help="initial (and largest) number of row clusters")
    f.add_argument("--gmax", type=int, help="initial (and largest) number of column clusters")
    for name in ("alpha0", "beta0", "eta", "zeta", "delta", "gamma", "kappa"):
        f.add_argument(f"--{name}", type=float, default=1.0)
    f.add_argument("--xi", type=float, default=0.0)
    f.add_argument("--prune", choices=["on", "off"], default="off")
    f.add_argument("--engine", choices=["dense", "sparse"], default="dense")
    f.add_argument("--restarts", type=int, default=1)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--threads", type=int, default=1)
    f.add_argument("--max-sweeps", type=int, default=SearchConfig.max_sweeps)
    f.add_argument("--output", required=True)
    f.add_argument("--heatmap")
    f.add_argument("--trace")

    s = sub.add_parser("simulate", help="draw a matrix from a planted blockmodel")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--m", type=int, default=100)
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--q", type=float)
    s.add_argument("--theta-file")
    s.add_argument("--model", choices=["bernoulli", "poisson"], default="bernoulli",
                   help="cell distribution for --theta-file grids")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["dense", "sparse"], default="dense")
    s.add_argument("--output", required=True)
    s.add_argument("--truth-output", required=True)

    e = sub.add_parser("evaluate", help="combined NMI of a fit against true labels")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)

    t = sub.add_parser("study", help="NMI versus noise level on the planted-diagonal design")
    t.add_argument("--q-grid", default="0.0125:0.0125:0.5")
    t.add_argument("--reps", type=int, default=20)
    t.add_argument("--restarts", type=int, default=5)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--n", type=int, default=100)
    t.add_argument("--m", type=int, default=100)
    t.add_argument("--k", type=int, default=5)
    t.add_argument("--out-csv", required=True)
    t.add_argument("--out-plot")
    return p


def _cmd_fit(a, parser) -> int:
    if a.categories is not None and a.model != "categorical":
        parser.error("--categories only applies to --model categorical")
    if a.model == "categorical" and a.categories is None:
        parser.error("--model categorical needs --categories")
    if a.restarts < 1 or a.threads < 1:
        parser.error("--restarts and --threads must be at least 1")
    try:
        prior = PriorConfig(model=a.model, alpha0=a.alpha0, beta0=a.beta0, eta=a.eta,
                            zeta=a.zeta, n_categories=a.categories or 2, delta=a.delta,
                            gamma=a.gamma, xi=a.xi, kappa=a.kappa)
    except ValueError as exc:
        parser.error(str(exc))
    adj = load(a.input, a.model, fmt=a.format, n_categories=a.categories)
    cfg = SearchConfig(k_init=a.kmax, g_init=a.gmax, pruning=a.prune == "on",
                       sparse_engine=a.engine == "sparse", restarts=a.restarts,
                       rng_seed=a.seed, threads=a.threads, max_sweeps=a.max_sweeps)
    try:
        cfg.resolve_sizes(adj.n_rows, adj.n_cols)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    res = fit(adj, prior, cfg)
    FitReport.from_result(res).write(a.output)
    if a.trace:
        write_trace_csv(res.history, a.trace)
    if a.heatmap:
        render_heatmap(adj, res.partition, a.heatmap)
    print(f"icl={res.icl:.6f} K={res.k} G={res.g} sweeps={res.sweeps_run} "
          f"restart={res.best_restart + 1}/{cfg.restarts}")
    return 0


def _cmd_simulate(a, parser) -> int:
    if (a.q is None) == (a.theta_file is None):
        parser.error("give exactly one of --q and --theta-file")
    if a.theta_file:
        theta = read_theta(a.theta_file)
        K, G = theta.shape
        try:
            spec = GeneratorSpec(a.n, a.m, np.full(K, 1.0 / K), np.full(G, 1.0 / G), theta,
                                 a.model, a.seed)
        except ValueError as exc:
            raise InputError(f"{a.theta_file}: {exc}") from None
    else:
        if not 0 <= a.q <= 1:
            raise InputError(f"q must lie in [0, 1], got {a.q}")
        spec = diagonal_spec(a.n, a.m, a.k, a.q, a.seed)
    adj, rows, cols = generate(spec)
    (save_sparse if a.format == "sparse" else save_dense)(adj, a.output)
    write_truth(a.truth_output, rows, cols)
    return 0


def _cmd_evaluate(a, parser) -> int:
    try:
        rep = FitReport.read(a.pred)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{a.pred}: not a fit report ({exc})") from None
    tr, tc = read_truth(a.truth)
    er, ec = np.asarray(rep.row_labels), np.asarray(rep.col_labels)
    if er.size != tr.size or ec.size != tc.size:
        raise InputError(f"label lengths differ: report has {er.size}x{ec.size}, "
                         f"truth has {tr.size}x{tc.size}")
    print(f"{combined_nmi(er, tr, ec, tc):.6f}")
    return 0


def _cmd_study(a, parser) -> int:
    try:
        grid = study.parse_grid(a.q_grid)
    except ValueError as exc:
        parser.error(str(exc))
    if np.any(grid < 0) or np.any(grid > 1):
        parser.error("q values must lie in [0, 1]")

    def progress(row):
        print(f"q={row.q:.4f} rep={row.replicate} nmi={row.nmi:.4f} K={row.k} G={row.g}",
              file=sys.stderr)

    rows = study.run_study(grid, reps=a.reps, restarts=a.restarts, seed=a.seed,
                           n=a.n, m=a.m, k=a.k, progress=progress)
    study.write_csv(rows, a.out_csv)
    if a.out_plot:
        study.plot(rows, a.out_plot)
    for q, mean in zip(*study.mean_by_q(rows)):
        print(f"{q:.4f} {mean:.4f}")
    return 0


COMMANDS = {"fit": _cmd_fit, "simulate": _cmd_simulate, "evaluate": _cmd_evaluate,
            "study": _cmd_study}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[a.command](a, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DataFormatError, InputError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        print(f"greedyicl: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"greedyicl: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
