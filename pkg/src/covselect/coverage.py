"""Per-point max-similarity state, the coverage estimator, and the impurity estimator.

Coverage of a labeled set L is the population mean of
max_{x' in L} k(x, x'); the state below carries that inner maximum per point
so that adding a point and scoring candidate additions are O(N) instead of
O(N |L|).
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, DomainError, StateError
from .kernels import iter_candidate_sq_rows, row_sq_norms, scan_block_size, sq_dists


class CoverageState:
    """Running maxima[i] = max over labeled x' of k(x_i, x'), with the labeled list.

    maxima is exactly 1 for labeled points (constant unit diagonal), 0
    everywhere when the labeled set is empty, and never decreases as points
    are added.
    """

    def __init__(self, store, kernel, labeled=()):
        self.store = store
        self.kernel = kernel
        self.labeled = []
        self.maxima = np.zeros(store.n_samples, dtype=np.float64)
        labeled = np.asarray(list(labeled), dtype=np.int64)
        if labeled.size:
            seen = set()
            for idx in labeled:
                if idx in seen:
                    raise StateError(f"duplicate labeled index {idx}")
                seen.add(int(idx))
            for pos, rows in iter_candidate_sq_rows(store, labeled):
                sims = kernel.from_sq_dists(rows)
                np.maximum(self.maxima, sims.max(axis=0), out=self.maxima)
            self.labeled = [int(i) for i in labeled]
            self.maxima[labeled] = 1.0

    def coverage(self):
        """Mean of the per-point maxima; 0 for an empty labeled set."""
        if not self.labeled:
            return 0.0
        return float(self.maxima.mean())

    def add_point(self, new_index):
        """Fold one more labeled point into the maxima (in place)."""
        new_index = int(new_index)
        if new_index in set(self.labeled):
            raise StateError(f"index {new_index} is already labeled")
        if not 0 <= new_index < self.store.n_samples:
            raise IndexError(f"index {new_index} out of range")
        for _, rows in iter_candidate_sq_rows(self.store, np.array([new_index])):
            sims = self.kernel.from_sq_dists(rows[0])
            np.maximum(self.maxima, sims, out=self.maxima)
        self.maxima[new_index] = 1.0
        self.labeled.append(new_index)
        return self

    def gains(self, candidates):
        """Coverage increase from adding each candidate, as a vector.

        gain(c) = mean_n max(k(x_n, x_c) - maxima[n], 0), which equals the
        coverage difference of adding c; evaluated blockwise over candidates.
        """
        candidates = np.asarray(candidates, dtype=np.int64)
        out = np.empty(candidates.size, dtype=np.float64)
        for pos, rows in iter_candidate_sq_rows(self.store, candidates):
            sims = self.kernel.from_sq_dists(rows)
            sims -= self.maxima[None, :]
            np.maximum(sims, 0.0, out=sims)
            out[pos] = sims.mean(axis=1)
        return out

    def marginal_gain(self, candidate):
        candidate = int(candidate)
        if not 0 <= candidate < self.store.n_samples:
            raise IndexError(f"candidate {candidate} out of range")
        return float(self.gains(np.array([candidate]))[0])


def min_cross_sq_dists(values, labels):
    """Per point, the squared distance to the nearest differently-labeled point."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    n = values.shape[0]
    norms = row_sq_norms(values)
    out = np.full(n, np.inf, dtype=np.float64)
    block = scan_block_size(n)
    for c in np.unique(labels):
        inside = np.flatnonzero(labels == c)
        outside = np.flatnonzero(labels != c)
        if outside.size == 0:
            continue
        for start in range(0, inside.size, block):
            idx = inside[start : start + block]
            sq = sq_dists(values[idx], values[outside], norms[idx], norms[outside])
            out[idx] = sq.min(axis=1)
    return out


def estimate_impurity(store, kernel, labels):
    """Mean over points of the max similarity to any differently-labeled point.

    Because every family is non-increasing in distance, the inner max equals
    the kernel at the nearest cross-label distance. A single label class
    leaves that max over an empty set undefined and is rejected rather than
    silently reported as pure.
    """
    labels = np.asarray(labels)
    if labels.shape != (store.n_samples,):
        raise DataError(f"labels must cover all {store.n_samples} points")
    if np.unique(labels).size < 2:
        raise DomainError("impurity needs at least two label classes")
    min_sq = min_cross_sq_dists(store.values, labels)
    return float(np.mean(kernel.from_sq_dists(min_sq)))
