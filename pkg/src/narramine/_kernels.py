"""Numeric kernels with two interchangeable backends.

The hot loops (k-means assignment, skip-gram training) exist twice: a
numba ``@njit`` version and a pure-numpy/python version.  The active
backend is chosen once at import time:

- ``NARRAMINE_BACKEND=numba``  force the compiled kernels (error if numba
  is unavailable)
- ``NARRAMINE_BACKEND=numpy``  force the fallback kernels
- unset                        use numba when importable, else numpy

Both backends implement the same arithmetic on float64 and share one
64-bit linear-congruential RNG, so results agree across backends to
floating-point roundoff and are bit-identical within a backend.
"""

from __future__ import annotations

import math
import os

import numpy as np

BACKEND_ENV = "NARRAMINE_BACKEND"

# 64-bit LCG (Knuth's MMIX multiplier); uniforms come from the top 53 bits.
LCG_MULT = 6364136223846793005
LCG_ADD = 1442695040888963407
_U64_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _detect_backend() -> str:
    choice = os.environ.get(BACKEND_ENV, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  -- fail loudly if forced but missing

        return "numba"
    if choice:
        raise ValueError(
            f"{BACKEND_ENV} must be 'numba' or 'numpy', got {choice!r}"
        )
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _detect_backend()
HAS_NUMBA = False
if BACKEND == "numba":
    from numba import njit

    HAS_NUMBA = True


# ---------------------------------------------------------------------------
# k-means assignment
# ---------------------------------------------------------------------------


def kmeans_assign_numpy(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Assign each row of X to its nearest centroid (squared Euclidean;
    ties go to the lowest centroid index)."""
    xx = np.einsum("ij,ij->i", X, X)
    cc = np.einsum("ij,ij->i", centroids, centroids)
    d2 = xx[:, None] + cc[None, :] - 2.0 * (X @ centroids.T)
    return np.argmin(d2, axis=1).astype(np.int64)


def _kmeans_assign_py(X, centroids):
    n, d = X.shape
    k = centroids.shape[0]
    labels = np.empty(n, np.int64)
    for i in range(n):
        best = 0
        best_d = np.inf
        for j in range(k):
            s = 0.0
            for t in range(d):
                diff = X[i, t] - centroids[j, t]
                s += diff * diff
            if s < best_d:
                best_d = s
                best = j
        labels[i] = best
    return labels


if HAS_NUMBA:
    kmeans_assign_numba = njit(cache=True)(_kmeans_assign_py)
else:  # pragma: no cover - exercised only when numba is absent
    def kmeans_assign_numba(X, centroids):
        raise RuntimeError("numba backend requested but numba is not installed")


def kmeans_assign(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    if BACKEND == "numba":
        return kmeans_assign_numba(X, centroids)
    return kmeans_assign_numpy(X, centroids)


def assigned_sq_distances(X: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Squared distance from each row to its assigned centroid (backend-neutral)."""
    diff = X - centroids[labels]
    return np.einsum("ij,ij->i", diff, diff)


# ---------------------------------------------------------------------------
# skip-gram with negative sampling
# ---------------------------------------------------------------------------


def sgns_epoch_numpy(
    flat: np.ndarray,
    offsets: np.ndarray,
    syn0: np.ndarray,
    syn1: np.ndarray,
    noise_cdf: np.ndarray,
    negatives: int,
    lr0: float,
    lr_min: float,
    total_pairs: int,
    pairs_done: int,
    state: int,
) -> tuple[float, int, int]:
    """One skip-gram epoch, pure Python/numpy.

    ``flat`` holds word ids document after document; ``offsets`` marks the
    document boundaries.  Every ordered pair of distinct positions inside a
    document is a (center, context) training pair.  ``syn0``/``syn1`` are
    updated in place.  Returns ``(loss_sum, n_pairs, new_state)``.
    """
    loss_sum = 0.0
    n_pairs = 0
    state &= _U64_MASK
    dim = syn0.shape[1]
    for doc_i in range(len(offsets) - 1):
        start = int(offsets[doc_i])
        stop = int(offsets[doc_i + 1])
        for i in range(start, stop):
            c = int(flat[i])
            v = syn0[c]
            for j in range(start, stop):
                if i == j:
                    continue
                w = int(flat[j])
                alpha = lr0 * (1.0 - pairs_done / total_pairs)
                if alpha < lr_min:
                    alpha = lr_min
                pairs_done += 1
                n_pairs += 1

                neu = np.zeros(dim)
                # positive target
                f = float(v @ syn1[w])
                if f >= 0.0:
                    p = 1.0 / (1.0 + math.exp(-f))
                    loss_sum += math.log1p(math.exp(-f))
                else:
                    e = math.exp(f)
                    p = e / (1.0 + e)
                    loss_sum += -f + math.log1p(e)
                g = (1.0 - p) * alpha
                neu += g * syn1[w]
                syn1[w] += g * v
                # negative targets
                for _ in range(negatives):
                    state = (state * LCG_MULT + LCG_ADD) & _U64_MASK
                    u = (state >> 11) * _INV_2_53
                    t = int(np.searchsorted(noise_cdf, u, side="right"))
                    if t == w:
                        continue
                    f = float(v @ syn1[t])
                    if f >= 0.0:
                        p = 1.0 / (1.0 + math.exp(-f))
                        loss_sum += f + math.log1p(math.exp(-f))
                    else:
                        e = math.exp(f)
                        p = e / (1.0 + e)
                        loss_sum += math.log1p(e)
                    g = -p * alpha
                    neu += g * syn1[t]
                    syn1[t] += g * v
                v += neu
    return loss_sum, n_pairs, state


def _sgns_epoch_jit_src(flat, offsets, syn0, syn1, noise_cdf, negatives,
                        lr0, lr_min, total_pairs, pairs_done, state):
    loss_sum = 0.0
    n_pairs = 0
    dim = syn0.shape[1]
    neu = np.zeros(dim)
    for doc_i in range(len(offsets) - 1):
        start = offsets[doc_i]
        stop = offsets[doc_i + 1]
        for i in range(start, stop):
            c = flat[i]
            for j in range(start, stop):
                if i == j:
                    continue
                w = flat[j]
                alpha = lr0 * (1.0 - pairs_done / total_pairs)
                if alpha < lr_min:
                    alpha = lr_min
                pairs_done += 1
                n_pairs += 1

                for t_ in range(dim):
                    neu[t_] = 0.0
                # positive target
                f = 0.0
                for t_ in range(dim):
                    f += syn0[c, t_] * syn1[w, t_]
                if f >= 0.0:
                    p = 1.0 / (1.0 + math.exp(-f))
                    loss_sum += math.log1p(math.exp(-f))
                else:
                    e = math.exp(f)
                    p = e / (1.0 + e)
                    loss_sum += -f + math.log1p(e)
                g = (1.0 - p) * alpha
                for t_ in range(dim):
                    neu[t_] += g * syn1[w, t_]
                for t_ in range(dim):
                    syn1[w, t_] += g * syn0[c, t_]
                # negative targets
                for _ in range(negatives):
                    state = state * np.uint64(LCG_MULT) + np.uint64(LCG_ADD)
                    u = (state >> np.uint64(11)) * _INV_2_53
                    t = np.searchsorted(noise_cdf, u, side="right")
                    if t == w:
                        continue
                    f = 0.0
                    for t_ in range(dim):
                        f += syn0[c, t_] * syn1[t, t_]
                    if f >= 0.0:
                        p = 1.0 / (1.0 + math.exp(-f))
                        loss_sum += f + math.log1p(math.exp(-f))
                    else:
                        e = math.exp(f)
                        p = e / (1.0 + e)
                        loss_sum += math.log1p(e)
                    g = -p * alpha
                    for t_ in range(dim):
                        neu[t_] += g * syn1[t, t_]
                    for t_ in range(dim):
                        syn1[t, t_] += g * syn0[c, t_]
                for t_ in range(dim):
                    syn0[c, t_] += neu[t_]
    return loss_sum, n_pairs, state


if HAS_NUMBA:
    _sgns_epoch_numba_impl = njit(cache=True)(_sgns_epoch_jit_src)

    def sgns_epoch_numba(flat, offsets, syn0, syn1, noise_cdf, negatives,
                         lr0, lr_min, total_pairs, pairs_done, state):
        loss, n_pairs, new_state = _sgns_epoch_numba_impl(
            flat, offsets, syn0, syn1, noise_cdf, negatives,
            float(lr0), float(lr_min), int(total_pairs), int(pairs_done),
            np.uint64(state & _U64_MASK),
        )
        return float(loss), int(n_pairs), int(new_state) & _U64_MASK
else:  # pragma: no cover - exercised only when numba is absent
    def sgns_epoch_numba(*args, **kwargs):
        raise RuntimeError("numba backend requested but numba is not installed")


def sgns_epoch(flat, offsets, syn0, syn1, noise_cdf, negatives,
               lr0, lr_min, total_pairs, pairs_done, state):
    if BACKEND == "numba":
        return sgns_epoch_numba(flat, offsets, syn0, syn1, noise_cdf, negatives,
                                lr0, lr_min, total_pairs, pairs_done, state)
    return sgns_epoch_numpy(flat, offsets, syn0, syn1, noise_cdf, negatives,
                            lr0, lr_min, total_pairs, pairs_done, state)


def lcg_next(state: int) -> int:
    """Advance the shared 64-bit LCG one step (reference implementation)."""
    return (state * LCG_MULT + LCG_ADD) & _U64_MASK


def lcg_uniform(state: int) -> tuple[int, float]:
    """Advance the LCG and emit one uniform double in [0, 1)."""
    state = lcg_next(state)
    return state, (state >> 11) * _INV_2_53
