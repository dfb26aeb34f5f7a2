"""Benchmark the jitted kernels against the pure-numpy fallbacks.

Usage:  python3 benchmarks/bench_kernels.py [--experts N] [--rows N]

Times one large EM problem (many followed experts, fixed iteration
budget) and one large scoring batch (truncated top-k log sums over a
ragged array).  The first jitted call is excluded via a warmup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from topicrec import _kernels


def build_em_problem(n_experts, n_topics, topics_per_expert, seed=0):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(2, topics_per_expert + 1, size=n_experts)
    indptr = np.zeros(n_experts + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(sizes)
    total = int(indptr[-1])
    topic_idx = rng.integers(0, n_topics, size=total).astype(np.int64)
    theta = rng.uniform(0.001, 1.0, size=total)
    i0 = rng.uniform(0.01, 1.0, size=n_topics)
    i0 /= i0.sum()
    return theta, topic_idx, indptr, n_topics, i0


def build_score_batch(n_rows, max_len, seed=0):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, max_len + 1, size=n_rows)
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(sizes)
    values = rng.normal(size=int(indptr[-1]))
    return values, indptr


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--experts", type=int, default=20_000)
    parser.add_argument("--topics", type=int, default=500)
    parser.add_argument("--rows", type=int, default=200_000)
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    em_args = build_em_problem(args.experts, args.topics, 6)
    em_full = (*em_args, 25, 1e-12, 1e-15)  # fixed 25 iterations
    score_args = build_score_batch(args.rows, 12)

    # Warmup triggers jit compilation.
    _kernels.em_run_numba(*em_full)
    _kernels.top_sum_numba(*score_args, 3)

    rows = []
    t_nb = time_call(_kernels.em_run_numba, *em_full)
    t_np = time_call(_kernels.em_run_numpy, *em_full)
    rows.append(("em_run", args.experts, t_nb, t_np))

    t_nb = time_call(_kernels.top_sum_numba, *score_args, 3)
    t_np = time_call(_kernels.top_sum_numpy, *score_args, 3)
    rows.append(("top_sum", args.rows, t_nb, t_np))

    print(f"{'kernel':<10} {'size':>9} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, size, nb, np_ in rows:
        print(f"{name:<10} {size:>9} {nb * 1e3:>10.2f}ms {np_ * 1e3:>10.2f}ms "
              f"{np_ / nb:>8.1f}x")

    # Both builds must agree on results.
    f_nb, n_nb, *_ = _kernels.em_run_numba(*em_full)
    f_np, n_np, *_ = _kernels.em_run_numpy(*em_full)
    assert n_nb == n_np and np.allclose(f_nb, f_np, atol=1e-12)
    s_nb = _kernels.top_sum_numba(*score_args, 3)
    s_np = _kernels.top_sum_numpy(*score_args, 3)
    assert np.array_equal(s_nb, s_np)
    print("result parity: ok")


if __name__ == "__main__":
    main()
