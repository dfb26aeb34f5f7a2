"""Hot numeric kernels: fused EM updates and truncated rank-product sums.

Each kernel ships in two builds over identical flat-array layouts: a
numba ``@njit`` build (default whenever numba imports) and a pure-numpy
fallback.  Set ``TOPICREC_NO_NUMBA=1`` to force the fallback;
``benchmarks/bench_kernels.py`` times the two side by side.

EM problem layout (one user): followed experts are rows of a ragged
CSR-like structure.  ``indptr`` has one slot per expert plus one;
``topic_idx[indptr[v]:indptr[v+1]]`` are the indices of the expert's
topics (global topic included) and ``theta[...]`` the matching
popularity weights.
"""

from __future__ import annotations

import os

import numpy as np


def _em_run_loops(theta, topic_idx, indptr, n_topics, i_init, max_iters,
                  rel_stop, abs_eps):
    """One user's full EM run; returns per-iteration history.

    Each iteration multiplies the current interest into every expert's
    topic weights (E-step), averages the normalized responsibilities
    (M-step), and logs the likelihood.  Stops when the relative
    log-likelihood gain drops below ``rel_stop`` (absolute ``abs_eps``
    when the previous value is exactly zero), or at ``max_iters``.
    """
    n_experts = indptr.shape[0] - 1
    iter_hist = np.zeros((max_iters + 1, n_topics))
    ll_hist = np.zeros(max_iters + 1)
    denom = np.zeros(n_experts)

    cur = i_init.copy()
    iter_hist[0] = cur
    ll = 0.0
    for v in range(n_experts):
        acc = 0.0
        for j in range(indptr[v], indptr[v + 1]):
            acc += theta[j] * cur[topic_idx[j]]
        denom[v] = acc
        ll += np.log(acc)
    ll_hist[0] = ll

    n_done = 0
    for it in range(1, max_iters + 1):
        new = np.zeros(n_topics)
        for v in range(n_experts):
            dv = denom[v]
            for j in range(indptr[v], indptr[v + 1]):
                new[topic_idx[j]] += theta[j] * cur[topic_idx[j]] / dv
        for t in range(n_topics):
            new[t] /= n_experts
        cur = new

        ll_prev = ll
        ll = 0.0
        for v in range(n_experts):
            acc = 0.0
            for j in range(indptr[v], indptr[v + 1]):
                acc += theta[j] * cur[topic_idx[j]]
            denom[v] = acc
            ll += np.log(acc)
        iter_hist[it] = cur
        ll_hist[it] = ll
        n_done = it

        gain = ll - ll_prev
        if ll_prev != 0.0:
            if gain / abs(ll_prev) < rel_stop:
                break
        elif gain < abs_eps:
            break

    return cur, n_done, ll_hist[: n_done + 1], iter_hist[: n_done + 1]


def _em_run_numpy(theta, topic_idx, indptr, n_topics, i_init, max_iters,
                  rel_stop, abs_eps):
    """Vectorized fallback for :func:`_em_run_loops` (same contract)."""
    n_experts = indptr.shape[0] - 1
    expert_of = np.repeat(np.arange(n_experts), np.diff(indptr))
    iter_hist = np.zeros((max_iters + 1, n_topics))
    ll_hist = np.zeros(max_iters + 1)

    cur = i_init.copy()
    iter_hist[0] = cur
    weighted = theta * cur[topic_idx]
    denom = np.add.reduceat(weighted, indptr[:-1])
    ll = float(np.sum(np.log(denom)))
    ll_hist[0] = ll

    n_done = 0
    for it in range(1, max_iters + 1):
        resp = weighted / denom[expert_of]
        cur = np.bincount(topic_idx, weights=resp, minlength=n_topics) / n_experts

        ll_prev = ll
        weighted = theta * cur[topic_idx]
        denom = np.add.reduceat(weighted, indptr[:-1])
        ll = float(np.sum(np.log(denom)))
        iter_hist[it] = cur
        ll_hist[it] = ll
        n_done = it

        gain = ll - ll_prev
        if ll_prev != 0.0:
            if gain / abs(ll_prev) < rel_stop:
                break
        elif gain < abs_eps:
            break

    return cur, n_done, ll_hist[: n_done + 1], iter_hist[: n_done + 1]


def _top_sum_loops(values, indptr, limit):
    """Per-row sum of the ``limit`` largest values in a ragged array.

    Rows with fewer than ``limit`` entries sum everything; empty rows
    sum to zero.  Values are summed largest-first so both builds add in
    the same order and produce bit-identical floats.
    """
    n_rows = indptr.shape[0] - 1
    out = np.zeros(n_rows)
    for r in range(n_rows):
        seg = np.sort(values[indptr[r]: indptr[r + 1]])[::-1]
        m = min(limit, seg.shape[0])
        acc = 0.0
        for i in range(m):
            acc += seg[i]
        out[r] = acc
    return out


def _top_sum_numpy(values, indptr, limit):
    """Fallback for :func:`_top_sum_loops` (same contract and float order)."""
    n_rows = indptr.shape[0] - 1
    out = np.zeros(n_rows)
    for r in range(n_rows):
        seg = np.sort(values[indptr[r]: indptr[r + 1]])[::-1][:limit]
        acc = 0.0
        for v in seg:
            acc += float(v)
        out[r] = acc
    return out


_FORCE_NUMPY = os.environ.get("TOPICREC_NO_NUMBA", "").lower() in {"1", "true", "yes"}

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

if HAVE_NUMBA:
    em_run_numba = njit(cache=True)(_em_run_loops)
    top_sum_numba = njit(cache=True)(_top_sum_loops)
else:  # pragma: no cover
    em_run_numba = None
    top_sum_numba = None

em_run_numpy = _em_run_numpy
top_sum_numpy = _top_sum_numpy

USING_NUMBA = HAVE_NUMBA and not _FORCE_NUMPY
if USING_NUMBA:
    em_run = em_run_numba
    top_sum = top_sum_numba
else:
    em_run = em_run_numpy
    top_sum = top_sum_numpy
