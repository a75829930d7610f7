#!/usr/bin/env python
"""Time the compiled kernels against their pure-numpy fallbacks.

Runs the two hot kernels -- centroid assignment and one skip-gram epoch --
on synthetic data with both backends and prints a small table.  The numba
variants are warmed up once before timing so JIT compilation is reported
separately instead of polluting the steady-state numbers.

Usage::

    python benchmarks/bench_backends.py [--repeats N] [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from narramine._kernels import (
    HAS_NUMBA,
    kmeans_assign_numba,
    kmeans_assign_numpy,
    sgns_epoch_numba,
    sgns_epoch_numpy,
)


def best_of(fn, repeats: int) -> float:
    """Best wall-clock time of ``repeats`` calls, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kmeans(n: int, dim: int, k: int, repeats: int) -> dict:
    rng = np.random.default_rng(0)
    X = rng.random((n, dim))
    centroids = rng.random((k, dim))

    t_compile = time.perf_counter()
    labels_nb = kmeans_assign_numba(X, centroids)
    t_compile = time.perf_counter() - t_compile

    labels_np = kmeans_assign_numpy(X, centroids)
    if not np.array_equal(labels_np, labels_nb):
        raise AssertionError("backends disagree on centroid assignment")

    return {
        "name": f"kmeans_assign  n={n} dim={dim} k={k}",
        "numpy": best_of(lambda: kmeans_assign_numpy(X, centroids), repeats),
        "numba": best_of(lambda: kmeans_assign_numba(X, centroids), repeats),
        "compile": t_compile,
    }


def bench_sgns(vocab: int, docs: int, doc_len: int, dim: int,
               negatives: int, repeats: int) -> dict:
    rng = np.random.default_rng(1)
    flat = rng.integers(0, vocab, size=docs * doc_len, dtype=np.int64)
    offsets = np.arange(0, docs * doc_len + 1, doc_len, dtype=np.int64)
    counts = np.bincount(flat, minlength=vocab).astype(np.float64) ** 0.75
    noise_cdf = np.cumsum(counts / counts.sum())
    syn0_init = (rng.random((vocab, dim)) - 0.5) / dim
    total_pairs = docs * doc_len * (doc_len - 1)

    def run(epoch_fn):
        syn0 = syn0_init.copy()
        syn1 = np.zeros((vocab, dim))
        return epoch_fn(flat, offsets, syn0, syn1, noise_cdf, negatives,
                        0.025, 0.025e-4, total_pairs, 0, 12345)

    t_compile = time.perf_counter()
    loss_nb, pairs_nb, _ = run(sgns_epoch_numba)
    t_compile = time.perf_counter() - t_compile

    loss_np, pairs_np, _ = run(sgns_epoch_numpy)
    if pairs_np != pairs_nb or not np.isclose(loss_np, loss_nb, rtol=1e-9):
        raise AssertionError("backends disagree on epoch loss")

    return {
        "name": f"sgns_epoch     V={vocab} pairs={total_pairs} dim={dim} neg={negatives}",
        "numpy": best_of(lambda: run(sgns_epoch_numpy), repeats),
        "numba": best_of(lambda: run(sgns_epoch_numba), repeats),
        "compile": t_compile,
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed calls per kernel; the best is reported")
    parser.add_argument("--quick", action="store_true",
                        help="use smaller problem sizes")
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1

    if args.quick:
        rows = [
            bench_kmeans(n=2_000, dim=50, k=20, repeats=args.repeats),
            bench_sgns(vocab=500, docs=100, doc_len=8, dim=25,
                       negatives=5, repeats=args.repeats),
        ]
    else:
        rows = [
            bench_kmeans(n=20_000, dim=100, k=50, repeats=args.repeats),
            bench_kmeans(n=100_000, dim=100, k=200, repeats=args.repeats),
            bench_sgns(vocab=2_000, docs=400, doc_len=12, dim=50,
                       negatives=5, repeats=args.repeats),
            bench_sgns(vocab=5_000, docs=800, doc_len=15, dim=100,
                       negatives=10, repeats=args.repeats),
        ]

    width = max(len(r["name"]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}  {'jit (1st call)':>14}")
    for r in rows:
        speedup = r["numpy"] / r["numba"]
        print(f"{r['name']:<{width}}  {r['numpy']:>9.4f}s  {r['numba']:>9.4f}s"
              f"  {speedup:>7.1f}x  {r['compile']:>13.3f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
