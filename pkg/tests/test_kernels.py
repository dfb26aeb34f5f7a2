"""Numba and numpy kernel builds must agree."""

import random

import numpy as np
import pytest

from topicrec import _kernels


def _random_em_problem(seed):
    rng = random.Random(seed)
    n_topics = rng.randrange(2, 8)
    n_experts = rng.randrange(1, 10)
    theta, topic_idx, indptr = [], [], [0]
    for _ in range(n_experts):
        k = rng.randrange(1, n_topics + 1)
        for t in rng.sample(range(n_topics), k):
            topic_idx.append(t)
            theta.append(rng.uniform(0.01, 1.0))
        indptr.append(len(theta))
    i0 = np.array([rng.uniform(0.01, 1.0) for _ in range(n_topics)])
    i0 /= i0.sum()
    return (
        np.array(theta), np.array(topic_idx, dtype=np.int64),
        np.array(indptr, dtype=np.int64), n_topics, i0,
    )


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
class TestBuildsAgree:
    def test_em_run(self):
        for seed in range(10):
            theta, tidx, indptr, n_topics, i0 = _random_em_problem(seed)
            args = (theta, tidx, indptr, n_topics, i0, 50, 1e-6, 1e-12)
            f_nb, n_nb, ll_nb, hist_nb = _kernels.em_run_numba(*args)
            f_np, n_np, ll_np, hist_np = _kernels.em_run_numpy(*args)
            assert n_nb == n_np
            np.testing.assert_allclose(f_nb, f_np, atol=1e-12)
            np.testing.assert_allclose(ll_nb, ll_np, atol=1e-9)
            np.testing.assert_allclose(hist_nb, hist_np, atol=1e-12)

    def test_top_sum_bit_identical(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=200)
        bounds = np.sort(rng.choice(np.arange(1, 200), size=30, replace=False))
        indptr = np.concatenate([[0], bounds, [200]]).astype(np.int64)
        for limit in (1, 3, 7):
            nb = _kernels.top_sum_numba(values, indptr, limit)
            np_ = _kernels.top_sum_numpy(values, indptr, limit)
            assert np.array_equal(nb, np_)


class TestTopSumSemantics:
    def test_matches_sorted_oracle(self):
        rng = np.random.default_rng(11)
        values = rng.normal(size=50)
        indptr = np.array([0, 0, 4, 10, 50], dtype=np.int64)
        out = _kernels.top_sum(values, indptr, 3)
        for r in range(4):
            seg = sorted(values[indptr[r]: indptr[r + 1]], reverse=True)[:3]
            assert out[r] == pytest.approx(sum(seg), abs=1e-12)

    def test_empty_row_sums_to_zero(self):
        out = _kernels.top_sum(np.array([1.0]), np.array([0, 0, 1], dtype=np.int64), 3)
        assert out[0] == 0.0 and out[1] == 1.0


class TestEmRunSemantics:
    def test_respects_max_iters(self):
        theta, tidx, indptr, n_topics, i0 = _random_em_problem(4)
        _, n_iters, ll_hist, hist = _kernels.em_run(
            theta, tidx, indptr, n_topics, i0, 3, 1e-18, 1e-18)
        assert n_iters <= 3
        assert len(ll_hist) == n_iters + 1
        assert hist.shape == (n_iters + 1, n_topics)

    def test_stop_rule_triggers(self):
        theta, tidx, indptr, n_topics, i0 = _random_em_problem(4)
        _, n_loose, *_ = _kernels.em_run(
            theta, tidx, indptr, n_topics, i0, 500, 0.01, 1e-12)
        _, n_tight, *_ = _kernels.em_run(
            theta, tidx, indptr, n_topics, i0, 500, 1e-10, 1e-12)
        assert n_loose <= n_tight
