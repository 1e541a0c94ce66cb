"""Compiled inner loops of the greedy search.

Every kernel works on one *side* of the matrix: side ``a`` is the node set
being relabelled, side ``b`` the fixed one.  Row moves pass the arrays as
they are; column moves pass the transposed views (``stats.transpose(1, 0, 2)``
etc.), so one implementation serves both.

Block statistics are float64 payload vectors:

* Bernoulli ``[ones]``
* Categorical ``[n_1, ..., n_{C-1}]`` (category 0 is implicit)
* Poisson ``[sum, sum log y!]``
* Gaussian ``[sum, sum of squares]``

Integer-valued payloads stay exact in float64, so dense and sparse slices
give bit-identical statistics.

Log-gamma values of integer arguments are looked up in precomputed tables
(``tab_cnt`` indexed by a count or sum, ``tab_size`` indexed by block size).
"""

import math

import numpy as np
from numba import njit
from scipy.special import gammaln

BERNOULLI, CATEGORICAL, POISSON, GAUSSIAN = 0, 1, 2, 3
_LOG_PI = math.log(math.pi)


def build_tables(model, hp, max_count, max_size):
    """Log-gamma tables used by :func:`log_marginal`."""
    n = np.arange(max_size + 1, dtype=float)
    if model == BERNOULLI:
        eta = hp[0]
        return gammaln(n + eta), gammaln(n + 2 * eta)
    if model == CATEGORICAL:
        zeta, c = hp[0], hp[1]
        return gammaln(n + zeta), gammaln(n + zeta * c)
    if model == POISSON:
        s = np.arange(max_count + 1, dtype=float)
        return gammaln(s + hp[0]), np.log(n + hp[1])
    kappa, gamma = hp[1], hp[2]
    ts = -0.5 * n * _LOG_PI - 0.5 * np.log(n + kappa) + gammaln(0.5 * (n + gamma))
    return np.zeros(1), ts


@njit(cache=True, nogil=True)
def log_marginal_comb(model, size, a, b, sgn, hp, tc, ts):
    """log marginal likelihood of a block whose payload is ``a + sgn * b``."""
    if size == 0:
        return 0.0
    if model == BERNOULLI:
        n1 = int(a[0] + sgn * b[0])
        return hp[1] + tc[n1] + tc[size - n1] - ts[size]
    if model == CATEGORICAL:
        # same summation order as the Bernoulli branch, so C = 2 agrees exactly
        rest = size
        acc = hp[2]
        for p in range(a.shape[0]):
            n = int(a[p] + sgn * b[p])
            rest -= n
            acc += tc[n]
        acc += tc[rest]
        return acc - ts[size]
    if model == POISSON:
        s = a[0] + sgn * b[0]
        lf = a[1] + sgn * b[1]
        return hp[2] + tc[int(s)] - (s + hp[0]) * ts[size] - lf
    xi = hp[0]
    ka = hp[1]
    s = a[0] + sgn * b[0]
    ss = a[1] + sgn * b[1]
    m = s + ka * xi
    scale = ss + ka * xi * xi - m * m / (size + ka) + hp[3]
    return hp[4] + ts[size] - 0.5 * (size + hp[2]) * math.log(scale)


@njit(cache=True, nogil=True)
def log_marginal(model, size, a, hp, tc, ts):
    return log_marginal_comb(model, size, a, a, 0.0, hp, tc, ts)


@njit(cache=True, nogil=True)
def _add_value(model, out, v, aux):
    if model == BERNOULLI:
        out[0] += v
    elif model == CATEGORICAL:
        if v > 0:
            out[int(v) - 1] += 1.0
    elif model == POISSON:
        out[0] += v
        out[1] += aux
    else:
        out[0] += v
        out[1] += v * v


@njit(cache=True, nogil=True)
def compute_slice(i, lb, kb, model, dense, daux, indptr, indices, data, saux,
                  use_sparse, out):
    """Statistics of node ``i`` restricted to each cluster of the other side.

    The dense path visits every cell of the row; the sparse path visits only
    the stored non-zeros.  Zero cells add nothing to any payload, so both give
    the same numbers; the zero count of each block is implied by its size.
    """
    for g in range(kb):
        for p in range(out.shape[1]):
            out[g, p] = 0.0
    if use_sparse:
        for t in range(indptr[i], indptr[i + 1]):
            _add_value(model, out[lb[indices[t]]], data[t], saux[t])
    else:
        for j in range(dense.shape[1]):
            _add_value(model, out[lb[j]], dense[i, j], daux[i, j])


@njit(cache=True, nogil=True)
def build_stats(la, lb, ka, kb, model, dense, daux, indptr, indices, data, saux,
                use_sparse, stats, buf):
    stats[:] = 0.0
    for i in range(la.shape[0]):
        compute_slice(i, lb, kb, model, dense, daux, indptr, indices, data, saux,
                      use_sparse, buf)
        k = la[i]
        for g in range(kb):
            for p in range(stats.shape[2]):
                stats[k, g, p] += buf[g, p]


@njit(cache=True, nogil=True)
def refresh_logl(ka, kb, ca, cb, stats, logl, model, hp, tc, ts):
    for k in range(ka):
        for g in range(kb):
            logl[k, g] = log_marginal(model, ca[k] * cb[g], stats[k, g], hp, tc, ts)


@njit(cache=True, nogil=True)
def _removal_part(k0, kb, ca, cb, stats, logl, sl, model, hp, tc, ts):
    n0 = ca[k0] - 1
    acc = 0.0
    for g in range(kb):
        acc += log_marginal_comb(model, n0 * cb[g], stats[k0, g], sl[g], -1.0,
                                 hp, tc, ts) - logl[k0, g]
    return acc


@njit(cache=True, nogil=True)
def _insert_part(l, kb, ca, cb, stats, logl, sl, model, hp, tc, ts):
    n1 = ca[l] + 1
    acc = 0.0
    for g in range(kb):
        acc += log_marginal_comb(model, n1 * cb[g], stats[l, g], sl[g], 1.0,
                                 hp, tc, ts) - logl[l, g]
    return acc


@njit(cache=True, nogil=True)
def _removal_prior(k0, ka, ca, ptab, ktab):
    n0 = ca[k0]
    d = ptab[n0 - 1] - ptab[n0]
    if n0 == 1:
        d += ktab[ka - 1] - ktab[ka]
    return d


@njit(cache=True, nogil=True)
def _delete_cluster(k0, ka, kb, la, ca, stats, logl, allowed):
    """Drop empty cluster ``k0`` and shift higher cluster indices down by one."""
    for k in range(k0, ka - 1):
        for g in range(kb):
            for p in range(stats.shape[2]):
                stats[k, g, p] = stats[k + 1, g, p]
            logl[k, g] = logl[k + 1, g]
        ca[k] = ca[k + 1]
        for r in range(allowed.shape[0]):
            allowed[r, k] = allowed[r, k + 1]
    last = ka - 1
    for g in range(kb):
        for p in range(stats.shape[2]):
            stats[last, g, p] = 0.0
        logl[last, g] = 0.0
    ca[last] = 0
    for r in range(allowed.shape[0]):
        allowed[r, last] = False
    for r in range(la.shape[0]):
        if la[r] > k0:
            la[r] -= 1


@njit(cache=True, nogil=True)
def _apply_move(i, k0, l, nk, ia, ib, la, ca, cb, stats, logl, sl, allowed,
                model, hp, tc, ts):
    kb = nk[ib]
    for g in range(kb):
        for p in range(stats.shape[2]):
            stats[k0, g, p] -= sl[g, p]
            stats[l, g, p] += sl[g, p]
    ca[k0] -= 1
    ca[l] += 1
    la[i] = l
    for g in range(kb):
        logl[k0, g] = log_marginal(model, ca[k0] * cb[g], stats[k0, g], hp, tc, ts)
        logl[l, g] = log_marginal(model, ca[l] * cb[g], stats[l, g], hp, tc, ts)
    if ca[k0] == 0:
        _delete_cluster(k0, nk[ia], kb, la, ca, stats, logl, allowed)
        nk[ia] -= 1


@njit(cache=True, nogil=True)
def delta_move(i, l, nk, ia, ib, la, ca, lb, cb, stats, logl,
               dense, daux, indptr, indices, data, saux, use_sparse,
               model, hp, tc, ts, ptab, ktab, sl):
    """ICL change of moving node ``i`` of side ``a`` into cluster ``l``."""
    k0 = la[i]
    if l == k0:
        return 0.0
    ka = nk[ia]
    kb = nk[ib]
    compute_slice(i, lb, kb, model, dense, daux, indptr, indices, data, saux, use_sparse, sl)
    d = _removal_part(k0, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
    d += _removal_prior(k0, ka, ca, ptab, ktab)
    d += _insert_part(l, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
    d += ptab[ca[l] + 1] - ptab[ca[l]]
    return d


@njit(cache=True, nogil=True)
def all_deltas(i, nk, ia, ib, la, ca, lb, cb, stats, logl,
               dense, daux, indptr, indices, data, saux, use_sparse,
               model, hp, tc, ts, ptab, ktab, sl, out):
    """Fill ``out[:K]`` with the ICL change for every target cluster of node ``i``."""
    k0 = la[i]
    ka = nk[ia]
    kb = nk[ib]
    compute_slice(i, lb, kb, model, dense, daux, indptr, indices, data, saux, use_sparse, sl)
    base = _removal_part(k0, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
    base += _removal_prior(k0, ka, ca, ptab, ktab)
    for l in range(ka):
        if l == k0:
            out[l] = 0.0
        else:
            out[l] = (base + _insert_part(l, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
                      + ptab[ca[l] + 1] - ptab[ca[l]])


@njit(cache=True, nogil=True)
def apply_move(i, l, nk, ia, ib, la, ca, lb, cb, stats, logl,
               dense, daux, indptr, indices, data, saux, use_sparse,
               model, hp, tc, ts, sl, allowed):
    k0 = la[i]
    if l == k0:
        return
    compute_slice(i, lb, nk[ib], model, dense, daux, indptr, indices, data, saux,
                  use_sparse, sl)
    _apply_move(i, k0, l, nk, ia, ib, la, ca, cb, stats, logl, sl, allowed,
                model, hp, tc, ts)


@njit(cache=True, nogil=True)
def sweep(order, nk, ia, ib, la, ca, lb, cb, stats, logl,
          dense, daux, indptr, indices, data, saux, use_sparse,
          model, hp, tc, ts, ptab, ktab, sl, cand, allowed,
          prune_active, threshold, eps, accepted):
    """One greedy pass over the nodes of side ``a`` in the given order.

    Each node moves to the cluster with the largest ICL gain when that gain
    exceeds ``eps``; ties go to the lowest cluster index.  The gains of
    accepted moves are written to ``accepted`` and their number returned.
    With ``prune_active`` set, clusters trailing the best candidate by more
    than ``threshold`` are removed from the node's allowed set for good.
    """
    n_moves = 0
    for t in range(order.shape[0]):
        i = order[t]
        ka = nk[ia]
        if ka < 2:
            break
        kb = nk[ib]
        k0 = la[i]
        compute_slice(i, lb, kb, model, dense, daux, indptr, indices, data, saux,
                      use_sparse, sl)
        base = _removal_part(k0, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
        base += _removal_prior(k0, ka, ca, ptab, ktab)
        best = -np.inf
        best_l = -1
        for l in range(ka):
            if l == k0 or not allowed[i, l]:
                continue
            d = (base + _insert_part(l, kb, ca, cb, stats, logl, sl, model, hp, tc, ts)
                 + ptab[ca[l] + 1] - ptab[ca[l]])
            cand[l] = d
            if d > best:
                best = d
                best_l = l
        if prune_active:
            top = best if best > 0.0 else 0.0
            for l in range(ka):
                if l != k0 and allowed[i, l] and top - cand[l] > threshold:
                    allowed[i, l] = False
        if best_l >= 0 and best > eps:
            _apply_move(i, k0, best_l, nk, ia, ib, la, ca, cb, stats, logl, sl, allowed,
                        model, hp, tc, ts)
            accepted[n_moves] = best
            n_moves += 1
    return n_moves


@njit(cache=True, nogil=True)
def merge_delta(k, k2, nk, ia, ib, ca, cb, stats, logl, model, hp, tc, ts, ptab, ktab):
    """ICL change of relabelling every node of cluster ``k2`` into ``k``."""
    ka = nk[ia]
    kb = nk[ib]
    n = ca[k] + ca[k2]
    d = ptab[n] - ptab[ca[k]] - ptab[ca[k2]] + ptab[0] + ktab[ka - 1] - ktab[ka]
    for g in range(kb):
        d += (log_marginal_comb(model, n * cb[g], stats[k, g], stats[k2, g], 1.0, hp, tc, ts)
              - logl[k, g] - logl[k2, g])
    return d


@njit(cache=True, nogil=True)
def best_merge(nk, ia, ib, ca, cb, stats, logl, model, hp, tc, ts, ptab, ktab):
    """Largest merge gain over all cluster pairs of side ``a`` (first pair wins ties)."""
    ka = nk[ia]
    best = -np.inf
    bk = -1
    bk2 = -1
    for k in range(ka):
        for k2 in range(k + 1, ka):
            d = merge_delta(k, k2, nk, ia, ib, ca, cb, stats, logl, model, hp, tc, ts,
                            ptab, ktab)
            if d > best:
                best = d
                bk = k
                bk2 = k2
    return best, bk, bk2


@njit(cache=True, nogil=True)
def apply_merge(k, k2, nk, ia, ib, la, ca, cb, stats, logl, allowed, model, hp, tc, ts):
    """Fold cluster ``k2`` into ``k`` and compact indices."""
    keep = min(k, k2)
    drop = max(k, k2)
    kb = nk[ib]
    for g in range(kb):
        for p in range(stats.shape[2]):
            stats[keep, g, p] += stats[drop, g, p]
            stats[drop, g, p] = 0.0
    ca[keep] += ca[drop]
    ca[drop] = 0
    for r in range(la.shape[0]):
        if la[r] == drop:
            la[r] = keep
    for r in range(allowed.shape[0]):
        allowed[r, keep] = allowed[r, keep] or allowed[r, drop]
    for g in range(kb):
        logl[keep, g] = log_marginal(model, ca[keep] * cb[g], stats[keep, g], hp, tc, ts)
        logl[drop, g] = 0.0
    _delete_cluster(drop, nk[ia], kb, la, ca, stats, logl, allowed)
    nk[ia] -= 1
