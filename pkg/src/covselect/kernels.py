"""Radial similarity kernels and Euclidean distance helpers.

Every family is a function of u = ||x - x'|| / lengthscale with value 1 at
u = 0 and non-increasing in u, so all kernels share a constant unit diagonal
and respect distance ordering. Distances are accumulated in float64 using
the clipped expansion sqrt(max(||a||^2 + ||b||^2 - 2 a.b, 0)), which cannot
go negative under round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

FAMILIES = ("gaussian", "tophat", "studentt", "laplace", "cauchy")

# Candidate scans materialize (block x N) float64 scratch; cap the block so
# scratch stays around ~200 MB even at N = 20k.
_SCAN_BUDGET = 25_000_000

# Full N x N squared-distance matrices are cached on the store below this
# size (3200^2 * 8 bytes ~= 80 MB) so repeated selector scans reuse them.
SQ_CACHE_LIMIT = 3200


@dataclass(frozen=True)
class Kernel:
    """A similarity family with its lengthscale (and dof for student-t)."""

    family: str = "gaussian"
    lengthscale: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if not (math.isfinite(self.lengthscale) and self.lengthscale > 0):
            raise ConfigError(f"lengthscale must be a positive finite real, got {self.lengthscale}")
        if self.family == "studentt" and not (math.isfinite(self.nu) and self.nu > 0):
            raise ConfigError(f"student-t nu must be a positive finite real, got {self.nu}")

    def __call__(self, dist):
        """Similarity at the given distance(s); raises DomainError off-domain."""
        d = np.asarray(dist, dtype=np.float64)
        if d.size and (not np.all(np.isfinite(d)) or np.any(d < 0)):
            raise DomainError("distances must be finite and nonnegative")
        out = self.from_sq_dists(np.square(d))
        if np.ndim(dist) == 0:
            return float(out)
        return out

    def from_sq_dists(self, sq):
        """Similarity from squared distances.

        Inputs are assumed to come from the clipped pairwise helpers
        (finite, nonnegative); no validation is performed. The top-hat
        boundary test is done in squared space, so dist <= delta and
        sq <= delta*delta agree on exact inputs.
        """
        sq = np.asarray(sq, dtype=np.float64)
        scale2 = self.lengthscale * self.lengthscale
        if self.family == "gaussian":
            return np.exp(sq * (-0.5 / scale2))
        if self.family == "tophat":
            return (sq <= scale2).astype(np.float64)
        u2 = sq / scale2
        if self.family == "cauchy":
            return 1.0 / (1.0 + u2)
        if self.family == "laplace":
            return np.exp(-np.sqrt(u2))
        # student-t
        return np.power(1.0 + u2 / self.nu, -0.5 * (self.nu + 1.0))


def row_sq_norms(values):
    return np.einsum("ij,ij->i", values, values)


def sq_dists(a, b, a_norms=None, b_norms=None):
    """Clipped squared Euclidean distances between rows of a and rows of b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a_norms is None:
        a_norms = row_sq_norms(a)
    if b_norms is None:
        b_norms = row_sq_norms(b)
    out = a @ b.T
    out *= -2.0
    out += a_norms[:, None]
    out += b_norms[None, :]
    np.maximum(out, 0.0, out=out)
    return out


def pairwise_to_set(store, query_index, targets):
    """Euclidean distances from one sample to a set of samples, in target order."""
    values = store.values
    n = values.shape[0]
    if not -0 <= query_index < n:
        raise IndexError(f"query index {query_index} out of range for {n} samples")
    targets = np.asarray(list(targets), dtype=np.int64)
    if targets.size == 0:
        return np.empty(0, dtype=np.float64)
    if targets.min() < 0 or targets.max() >= n:
        raise IndexError(f"target index out of range for {n} samples")
    sq = sq_dists(values[query_index : query_index + 1], values[targets])
    return np.sqrt(sq[0])


def full_sq_dist_cache(store):
    """The N x N squared-distance matrix, cached on the store; None above the size cap."""
    n = store.n_samples
    if n > SQ_CACHE_LIMIT:
        return None
    cache = getattr(store, "_sq_cache", None)
    if cache is None:
        v = store.values
        norms = row_sq_norms(v)
        cache = sq_dists(v, v, norms, norms)
        store._sq_cache = cache
    return cache


def scan_block_size(n_cols):
    return max(16, _SCAN_BUDGET // max(1, n_cols))


def cached_row_norms(store):
    norms = getattr(store, "_row_norms", None)
    if norms is None:
        norms = row_sq_norms(store.values)
        store._row_norms = norms
    return norms


def iter_candidate_sq_rows(store, candidates):
    """Yield (position slice, squared-distance rows) for candidate-major scans.

    Rows are candidates, columns are the full population, so reductions over
    the population run along contiguous memory. All selectors and the
    coverage state use this single path, which keeps cross-implementation
    comparisons on identical floating-point values.
    """
    values = store.values
    candidates = np.asarray(candidates, dtype=np.int64)
    cache = full_sq_dist_cache(store)
    if cache is not None:
        yield slice(0, candidates.size), cache[candidates]
        return
    norms = cached_row_norms(store)
    block = scan_block_size(values.shape[0])
    for start in range(0, candidates.size, block):
        stop = min(start + block, candidates.size)
        idx = candidates[start:stop]
        yield slice(start, stop), sq_dists(values[idx], values, norms[idx], norms)
