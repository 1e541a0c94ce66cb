"""Independent slow references used to check the fast code.

Nothing here calls the compiled kernels or the cached statistics: block
contents are gathered straight from the matrix cells and marginals are
either summed log-densities integrated numerically or plain lgamma sums.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats
from scipy.optimize import minimize_scalar

from .config import ModelKind, PriorConfig
from .data import BipartiteAdjacency
from .partition import Partition

SEARCH_CAP = 10**7


# --- closed forms written out cell by cell ---------------------------------

def _closed_block(values, prior: PriorConfig) -> float:
    """Conjugate marginal of one block, rebuilt from the raw cell values.

    Uses the sequential (predictive) form: the product of one-step-ahead
    posterior predictive densities, which equals the joint marginal.
    """
    m = prior.model
    total = 0.0
    if m == ModelKind.BERNOULLI:
        ones = zeros = 0
        for y in values:
            a, b = prior.eta + ones, prior.eta + zeros
            total += math.log((a if y else b) / (a + b))
            ones += int(y)
            zeros += 1 - int(y)
    elif m == ModelKind.CATEGORICAL:
        counts = [0] * prior.n_categories
        for y in values:
            y = int(y)
            total += math.log((prior.zeta + counts[y]) / (prior.zeta * prior.n_categories + sum(counts)))
            counts[y] += 1
    elif m == ModelKind.POISSON:
        shape, rate = prior.delta, prior.gamma
        for y in values:
            # negative binomial predictive
            total += float(stats.nbinom.logpmf(int(y), shape, rate / (rate + 1.0)))
            shape += y
            rate += 1.0
    else:
        mu, kap, a, b = prior.xi, prior.kappa, prior.gamma / 2.0, prior.delta / 2.0
        for y in values:
            # Student-t predictive of the normal-gamma model
            scale = math.sqrt(b * (kap + 1.0) / (a * kap))
            total += float(stats.t.logpdf(y, 2.0 * a, loc=mu, scale=scale))
            mu, kap, a, b = ((kap * mu + y) / (kap + 1.0), kap + 1.0, a + 0.5,
                             b + kap * (y - mu) ** 2 / (2.0 * (kap + 1.0)))
    return total


def _log_dm(counts, alpha) -> float:
    n, k = sum(counts), len(counts)
    return (math.lgamma(alpha * k) - math.lgamma(n + alpha * k)
            + sum(math.lgamma(c + alpha) - math.lgamma(alpha) for c in counts))


def icl_from_cells(adj: BipartiteAdjacency, prior: PriorConfig, row_labels, col_labels) -> float:
    """Exact ICL of a labeling, with every block gathered from raw cells."""
    y = adj.dense
    rl = np.asarray(row_labels)
    cl = np.asarray(col_labels)
    if rl.shape != (adj.n_rows,) or cl.shape != (adj.n_cols,):
        raise ValueError("label vectors do not match the matrix shape")
    K, G = int(rl.max()) + 1, int(cl.max()) + 1
    if len(np.unique(rl)) != K or len(np.unique(cl)) != G:
        raise ValueError("labels must use every value in 0..K-1 and 0..G-1")
    total = _log_dm(np.bincount(rl, minlength=K).tolist(), prior.alpha0)
    total += _log_dm(np.bincount(cl, minlength=G).tolist(), prior.beta0)
    for k in range(K):
        for g in range(G):
            cells = y[np.ix_(rl == k, cl == g)].ravel()
            if cells.size:
                total += _closed_block(cells.tolist(), prior)
    return total


def exhaustive_icl_max(adj: BipartiteAdjacency, prior: PriorConfig, k_max: int, g_max: int):
    """Maximum ICL over every labeling with at most ``k_max`` / ``g_max`` clusters.

    Labelings that leave a cluster empty are the same partition as a
    relabeled smaller one, so only surjective labelings in canonical
    (first-appearance) order are scored.  Returns ``(icl, Partition)``.
    """
    n, m = adj.shape
    if float(k_max) ** n * float(g_max) ** m > SEARCH_CAP:
        raise ValueError(f"search space {k_max}^{n} * {g_max}^{m} exceeds {SEARCH_CAP}")
    rows = list(_canonical_labelings(n, k_max))
    cols = list(_canonical_labelings(m, g_max))
    best, arg = -math.inf, None
    for r in rows:
        for c in cols:
            v = icl_from_cells(adj, prior, r, c)
            if v > best:
                best, arg = v, (r, c)
    return best, Partition(np.array(arg[0]), np.array(arg[1]))


def _canonical_labelings(n, kmax):
    for lab in itertools.product(range(kmax), repeat=n):
        seen = -1
        ok = True
        for v in lab:
            if v > seen + 1:
                ok = False
                break
            seen = max(seen, v)
        if ok:
            yield lab


# --- numerical integration ---------------------------------------------------

def quadrature_block_marginal(values, prior: PriorConfig) -> float:
    """log of the integral of prior x likelihood over the block parameter."""
    values = [float(v) for v in values]
    if len(values) > 8:
        raise ValueError("quadrature oracle handles at most 8 cells")
    if not values:
        return 0.0
    m = prior.model
    if m == ModelKind.BERNOULLI:
        return _quad_bernoulli(values, prior)
    if m == ModelKind.POISSON:
        return _quad_poisson(values, prior)
    if m == ModelKind.CATEGORICAL:
        return _quad_categorical(values, prior)
    return _quad_gaussian(values, prior)


def _log_beta_fn(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _quad_bernoulli(values, prior):
    n1 = sum(values)
    n0 = len(values) - n1
    e = prior.eta
    lnorm = -_log_beta_fn(e, e)

    def f(p):
        if p <= 0.0 or p >= 1.0:
            return 0.0
        return math.exp(lnorm + (e - 1 + n1) * math.log(p) + (e - 1 + n0) * math.log1p(-p))

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return math.log(val)


def _quad_poisson(values, prior):
    d, g = prior.delta, prior.gamma
    s = sum(values)
    n = len(values)
    lf = sum(math.lgamma(v + 1.0) for v in values)
    lnorm = d * math.log(g) - math.lgamma(d)
    # integrate over u = log(rate); the integrand is unimodal at `peak`
    peak = math.log((s + d) / (n + g))

    def f(u):
        lam = math.exp(u)
        return math.exp(lnorm + (d + s) * u - (g + n) * lam - lf)

    val, _ = integrate.quad(f, peak - 60.0, peak + 8.0, points=[peak],
                            epsabs=0.0, epsrel=1e-12, limit=400)
    return math.log(val)


def _quad_categorical(values, prior):
    C = prior.n_categories
    if C > 3:
        raise ValueError("categorical quadrature supports at most 3 categories")
    counts = np.bincount(np.asarray(values, dtype=int), minlength=C)
    z = prior.zeta
    lnorm = math.lgamma(C * z) - C * math.lgamma(z)
    e = [z - 1 + c for c in counts]
    opts = dict(epsabs=0.0, epsrel=1e-11)
    if C == 2:
        val, _ = integrate.quad(
            lambda p: math.exp(lnorm + e[0] * math.log1p(-p) + e[1] * math.log(p)) if 0 < p < 1 else 0.0,
            0.0, 1.0, limit=200, **opts)
        return math.log(val)

    # p1 = x, p2 = (1 - x) v, p0 = (1 - x)(1 - v); Jacobian (1 - x)
    def f(v, x):
        if not (0 < x < 1 and 0 < v < 1):
            return 0.0
        return math.exp(lnorm + (e[0] + e[2] + 1) * math.log1p(-x) + e[1] * math.log(x)
                        + e[2] * math.log(v) + e[0] * math.log1p(-v))

    val, _ = integrate.dblquad(f, 0.0, 1.0, 0.0, 1.0, **opts)
    return math.log(val)


def _gauss_legendre_panels(lo, hi, width, order):
    edges = np.linspace(lo, hi, max(1, int(math.ceil((hi - lo) / width))) + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _quad_gaussian(values, prior):
    """Tensor Gauss-Legendre grid over (log precision, standardized mean).

    Given the precision the mean is integrated over +-12 conditional
    standard deviations (discarded mass ~1e-32); the log-precision range
    extends 60 units below and 12 above the mode (discarded mass well
    under 1e-10 for block sizes up to 8).
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    xi, ka, ga, de = prior.xi, prior.kappa, prior.gamma, prior.delta
    mean = (y.sum() + ka * xi) / (n + ka)
    # mode of the log-precision integrand, located numerically

    def neg_log_profile(u):
        tau = math.exp(u)
        ss = float(((y - mean) ** 2).sum()) + ka * (mean - xi) ** 2 + de
        return -(0.5 * (ga + n) * u - 0.5 * tau * ss)

    centre = float(minimize_scalar(neg_log_profile, bracket=(-5.0, 5.0)).x)
    u, wu = _gauss_legendre_panels(centre - 60.0, centre + 12.0, 0.5, 20)
    z, wz = _gauss_legendre_panels(-12.0, 12.0, 1.0, 16)
    tau = np.exp(u)[:, None]
    prec = tau * (n + ka)
    mu = mean + z[None, :] / np.sqrt(prec)
    logf = (0.5 * ga * math.log(0.5 * de) - math.lgamma(0.5 * ga)
            + (0.5 * ga) * np.log(tau) - 0.5 * de * tau        # precision prior, with d tau = tau du
            + 0.5 * np.log(ka * tau / (2 * math.pi)) - 0.5 * ka * tau * (mu - xi) ** 2
            + 0.5 * n * np.log(tau / (2 * math.pi))
            - 0.5 * tau * ((y[None, None, :] - mu[..., None]) ** 2).sum(axis=2)
            - 0.5 * np.log(prec))                                # d mu = dz / sqrt(prec)
    top = logf.max()
    total = float((np.exp(logf - top) * wu[:, None] * wz[None, :]).sum())
    return top + math.log(total)



# --- full conditional -------------------------------------------------------

def direct_full_conditional(adj: BipartiteAdjacency, prior: PriorConfig, partition: Partition,
                            i: int, axis: int = 0) -> np.ndarray:
    """Collapsed posterior of node ``i``'s label over the current clusters,
    normalized from full joint evaluations.  When ``i`` is alone in its
    cluster, moving it elsewhere drops that cluster, as in the search."""
    rl = partition.row_labels.copy()
    cl = partition.col_labels.copy()
    lab = rl if axis == 0 else cl
    K = int(lab.max()) + 1
    logp = np.empty(K)
    for l in range(K):
        trial = lab.copy()
        trial[i] = l
        _, trial = np.unique(trial, return_inverse=True)
        if axis == 0:
            logp[l] = icl_from_cells(adj, prior, trial, cl)
        else:
            logp[l] = icl_from_cells(adj, prior, rl, trial)
    logp -= logp.max()
    p = np.exp(logp)
    return p / p.sum()
