"""Radius / lengthscale selection from an estimated purity sweep.

Purity at a radius is the fraction of points whose neighborhood contains no
differently-assigned point; the heuristic picks the largest grid value that
still keeps purity at or above the target (default 95%).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import kmeans
from .coverage import min_cross_sq_dists
from .errors import ConfigError, DataError
from .features import normalize_rows
from .kernels import Kernel

DEFAULT_GRID_START = 0.05
DEFAULT_GRID_STOP = 1.0
DEFAULT_GRID_STEPS = 20
DEFAULT_TARGET = 0.95


def default_grid():
    return np.linspace(DEFAULT_GRID_START, DEFAULT_GRID_STOP, DEFAULT_GRID_STEPS)


@dataclass
class PuritySweep:
    """A swept grid of radii/lengthscales with their purity rates and the chosen value."""

    grid: np.ndarray
    purity_rates: np.ndarray
    chosen: float
    target: float
    started_below_target: bool = False


def blob_purity(store, assignments, radius):
    """Fraction of points whose <= radius ball is assignment-pure.

    The center always counts as its own neighbor, so purity is 1 below the
    minimum pairwise distance; inclusion uses <= radius, matching the
    hard-radius kernel boundary.
    """
    assignments = np.asarray(assignments)
    if assignments.shape != (store.n_samples,):
        raise DataError(f"assignments must cover all {store.n_samples} points")
    if radius <= 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    if np.unique(assignments).size < 2:
        return 1.0
    min_sq = min_cross_sq_dists(store.values, assignments)
    return float(np.mean(min_sq > radius * radius))


def _chosen_from_rates(grid, rates, target):
    below = np.flatnonzero(rates < target)
    if below.size == 0:
        return float(grid[-1]), False
    first = int(below[0])
    if first == 0:
        return float(grid[0]), True
    return float(grid[first - 1]), False


def _pseudo_label_sweep(store, n_classes, seed, normalize):
    work = normalize_rows(store) if normalize else store
    assignments = kmeans(work.values, n_classes, seed=seed).assignments
    min_sq = min_cross_sq_dists(work.values, assignments)
    return work, assignments, min_sq


def choose_delta(store, n_classes, grid=None, target=DEFAULT_TARGET, seed=0, normalize=True):
    """Pick a hard radius: the last grid value whose blob purity stays >= target.

    Pseudo-labels come from k-means with k = n_classes on (by default)
    row-normalized features. If purity never drops below the target the last
    grid value is chosen; if even the first value is below the target, that
    first value is returned with started_below_target set.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ConfigError("grid must be non-empty and strictly ascending")
    _, _, min_sq = _pseudo_label_sweep(store, n_classes, seed, normalize)
    rates = np.array([float(np.mean(min_sq > r * r)) for r in grid])
    chosen, warned = _chosen_from_rates(grid, rates, target)
    return PuritySweep(grid=grid, purity_rates=rates, chosen=chosen, target=target,
                       started_below_target=warned)


def smooth_purity_rates(min_cross_sq, family, grid, nu=1.0):
    """1 - mean kernel similarity at the nearest cross-label distance, per lengthscale."""
    return np.array(
        [
            1.0 - float(np.mean(Kernel(family, float(ls), nu=nu).from_sq_dists(min_cross_sq)))
            for ls in grid
        ]
    )


def choose_lengthscale(
    store, n_classes, kernel_family="gaussian", grid=None, target=DEFAULT_TARGET,
    seed=0, nu=1.0, normalize=True,
):
    """Pick a smooth-kernel lengthscale by the same threshold rule as choose_delta.

    Purity of a lengthscale is one minus the impurity estimate under k-means
    pseudo-labels; it is non-increasing in the lengthscale for every family.
    """
    if kernel_family == "tophat":
        raise ConfigError("lengthscale selection applies to smooth kernel families; use choose_delta")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ConfigError("grid must be non-empty and strictly ascending")
    _, _, min_sq = _pseudo_label_sweep(store, n_classes, seed, normalize)
    rates = smooth_purity_rates(min_sq, kernel_family, grid, nu=nu)
    chosen, warned = _chosen_from_rates(grid, rates, target)
    return PuritySweep(grid=grid, purity_rates=rates, chosen=chosen, target=target,
                       started_below_target=warned)
