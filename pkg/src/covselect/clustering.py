"""Lloyd k-means with seeded k-means++ initialization, and m-NN typicality."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .kernels import row_sq_norms, sq_dists


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations_run: int
    inertia_trace: list = field(default_factory=list)


def _values_of(store_or_values):
    values = getattr(store_or_values, "values", store_or_values)
    return np.asarray(values, dtype=np.float64)


def _plus_plus_init(values, k, rng):
    n = values.shape[0]
    norms = row_sq_norms(values)
    centers = np.empty(k, dtype=np.int64)
    centers[0] = rng.integers(n)
    closest = sq_dists(values[centers[0] : centers[0] + 1], values, None, norms)[0]
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            pick = rng.choice(n, p=closest / total)
        else:
            # All remaining mass sits on existing centers; take the first
            # index not yet chosen to keep k distinct seeds.
            chosen = set(centers[:j].tolist())
            pick = next(i for i in range(n) if i not in chosen)
        centers[j] = pick
        d_new = sq_dists(values[pick : pick + 1], values, None, norms)[0]
        np.minimum(closest, d_new, out=closest)
    return values[centers].copy()


def kmeans(store_or_values, k, seed=0, max_iter=100, tol=1e-4):
    """Seeded k-means++ then Lloyd iterations until the max centroid shift < tol.

    Deterministic given (data, k, seed). Emptied clusters are reseeded to the
    point farthest from its assigned centroid, which keeps k clusters alive
    and never increases the objective.
    """
    values = _values_of(store_or_values)
    n = values.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(values, k, rng)
    norms = row_sq_norms(values)
    assignments = np.zeros(n, dtype=np.int64)
    trace = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist = sq_dists(values, centroids, norms, None)
        assignments = np.argmin(dist, axis=1)
        assigned_sq = dist[np.arange(n), assignments]
        counts = np.bincount(assignments, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            far = int(np.argmax(assigned_sq))
            assignments[far] = empty
            assigned_sq[far] = 0.0
            counts = np.bincount(assignments, minlength=k)
        new_centroids = np.zeros_like(centroids)
        for c in range(k):
            new_centroids[c] = values[assignments == c].mean(axis=0)
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        dist = sq_dists(values, centroids, norms, None)
        assignments = np.argmin(dist, axis=1)
        trace.append(float(dist[np.arange(n), assignments].sum()))
        if shift < tol:
            break
    return KMeansResult(
        centroids=centroids,
        assignments=assignments,
        inertia=trace[-1],
        iterations_run=iterations,
        inertia_trace=trace,
    )


TYPICALITY_EPS = 1e-12


def typicality_scores(values, m):
    """Inverse mean distance to the m nearest neighbors, for every row.

    m = 0 (single-point sets) and exact duplicates both hit the 1/eps
    sentinel cap instead of producing infinities.
    """
    values = _values_of(values)
    n = values.shape[0]
    if n == 1 or m == 0:
        return np.full(n, 1.0 / TYPICALITY_EPS)
    dist = np.sqrt(sq_dists(values, values))
    np.fill_diagonal(dist, np.inf)
    nearest = np.partition(dist, m - 1, axis=1)[:, :m]
    means = nearest.mean(axis=1)
    return 1.0 / np.maximum(means, TYPICALITY_EPS)


def typicality(store_or_values, index, m):
    """Typicality of one sample: inverse mean distance to its m nearest neighbors."""
    values = _values_of(store_or_values)
    n = values.shape[0]
    if not 1 <= m <= n - 1:
        raise ConfigError(f"m must lie in [1, {n - 1}], got {m}")
    if not 0 <= index < n:
        raise IndexError(f"index {index} out of range")
    others = np.delete(np.arange(n), index)
    dist = np.sqrt(sq_dists(values[index : index + 1], values[others])[0])
    mean = np.partition(dist, m - 1)[:m].mean()
    return float(1.0 / max(mean, TYPICALITY_EPS))
