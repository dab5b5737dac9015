"""Seeded end-to-end active-learning simulation with a 1-NN evaluator.

One loop iterates select -> annotate -> evaluate for T rounds. Labels are
revealed only at the annotate step; representation-based selectors are
audited (via FeatureStore.label_reads) to never touch them during selection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageState
from .errors import ConfigError, DataError, StateError
from .features import FeatureStore
from .kernels import Kernel, sq_dists
from .kmedoids import derive_seed, select_kmedoids
from .selectors import (
    _ADJACENCY_LIMIT,
    LabeledPool,
    MaxHerdingSession,
    ProbCoverSession,
    ProbMatrix,
    select_coreset,
    select_kernelherding,
    select_maxherding,
    select_probcover_graph,
    select_random,
    select_typiclust,
    select_uncertain,
)

METHODS = (
    "random",
    "maxherding",
    "kernelherding",
    "probcover",
    "coreset",
    "typiclust",
    "kmedoids",
    "uncertainty",
    "entropy",
    "margin",
)

_UNCERTAINTY_MODE = {"uncertainty": "least_confident", "entropy": "entropy", "margin": "margin"}


@dataclass(frozen=True)
class LoopConfig:
    """Everything one simulated run depends on; two equal configs give equal records."""

    method: str = "maxherding"
    budget: int = 10
    iterations: int = 10
    seed: int = 0
    kernel_family: str = "gaussian"
    lengthscale: float = 1.0
    nu: float = 1.0
    delta: float = 1.0
    typicality_m: int = 20
    cluster_cap: int = 500
    temperature: float = 0.1
    herding_ignore_pool: bool = False
    warm_start: bool = False
    max_swaps: int | None = None
    restarts: int = 1
    normalize: bool = False
    test_fraction: float = 0.25
    eval: str = "nn1"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.eval != "nn1":
            raise ConfigError(f"unknown evaluator {self.eval!r}")

    def kernel(self):
        return Kernel(self.kernel_family, self.lengthscale, nu=self.nu)


@dataclass
class RunRecord:
    """Per-iteration outcome of one run. ``truncated`` marks a budget-exhausted final round."""

    run_id: str
    iteration: int
    labeled_size: int
    accuracy: float
    coverage: float
    wall_ms: float
    method: str
    seed: int
    truncated: bool = False

    JSON_KEYS = ("run_id", "iteration", "labeled_size", "accuracy", "coverage",
                 "wall_ms", "method", "seed")

    def to_json_dict(self):
        return {
            "run_id": self.run_id,
            "iteration": self.iteration,
            "labeled_size": self.labeled_size,
            "accuracy": self.accuracy,
            "coverage": self.coverage,
            "wall_ms": self.wall_ms,
            "method": self.method,
            "seed": self.seed,
        }


def nn1_predict(train_store, pool, query_store):
    """Label of the Euclidean-nearest labeled point, per query row.

    Distance ties resolve to the lowest labeled sample index.
    """
    if len(pool) == 0:
        raise StateError("1-NN prediction needs a non-empty labeled pool")
    labeled = np.sort(np.asarray(pool.indices, dtype=np.int64))
    train_labels = train_store.labels
    query = query_store.values if isinstance(query_store, FeatureStore) else np.asarray(query_store)
    best_sq = np.full(query.shape[0], np.inf)
    best_pos = np.zeros(query.shape[0], dtype=np.int64)
    # Scan labeled rows in ascending order so argmin-first keeps the lowest index.
    train_sub = train_store.values[labeled]
    for start in range(0, labeled.size, 4096):
        stop = min(start + 4096, labeled.size)
        sq = sq_dists(query, train_sub[start:stop])
        pos = np.argmin(sq, axis=1)
        vals = sq[np.arange(query.shape[0]), pos]
        better = vals < best_sq
        best_sq[better] = vals[better]
        best_pos[better] = pos[better] + start
    return train_labels[labeled[best_pos]]


def soft_nn_probs(train_store, pool, query_store, temperature):
    """Distance-softmax class probabilities from the labeled pool.

    Row q is softmax_c(-d_c(q) / temperature) where d_c(q) is the distance
    from q to the nearest labeled point of class c; classes absent from the
    pool keep probability zero.
    """
    if temperature <= 0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    if len(pool) == 0:
        raise StateError("probability surrogate needs a non-empty labeled pool")
    n_classes = train_store.n_classes
    pool_labels = train_store.labels[pool.indices]
    query = query_store.values if isinstance(query_store, FeatureStore) else np.asarray(query_store)
    dists = np.full((query.shape[0], n_classes), np.inf)
    for c in np.unique(pool_labels):
        members = pool.indices[pool_labels == c]
        sq = sq_dists(query, train_store.values[members])
        dists[:, c] = np.sqrt(sq.min(axis=1))
    # Absent classes keep -inf logits, hence exactly zero weight.
    logits = -dists / temperature
    logits -= logits.max(axis=1, keepdims=True)
    weights = np.exp(logits)
    probs = weights / weights.sum(axis=1, keepdims=True)
    return ProbMatrix(probs)


def split_store(store, test_fraction, seed):
    """Deterministic train/test split by a seeded permutation."""
    if not 0 < test_fraction < 1:
        raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = store.n_samples
    rng = np.random.default_rng(derive_seed(seed, -1))
    order = rng.permutation(n)
    n_test = int(round(test_fraction * n))
    if n_test == 0 or n_test == n:
        raise ConfigError("test split would be empty")
    test_idx = np.sort(order[:n_test])
    train_idx = np.sort(order[n_test:])
    return store.subset(train_idx), store.subset(test_idx)


def run_selector(method, store, pool, budget, config, seed):
    """Dispatch one selection call for the loop/CLI. Returns a SelectionBatch."""
    kernel = config.kernel()
    if method == "random":
        return select_random(store, pool, budget, seed)
    if method == "maxherding":
        return select_maxherding(store, pool, budget, kernel)
    if method == "kernelherding":
        return select_kernelherding(store, pool, budget, kernel,
                                    ignore_pool=config.herding_ignore_pool)
    if method == "probcover":
        return select_probcover_graph(store, pool, budget, config.delta)
    if method == "coreset":
        return select_coreset(store, pool, budget, seed)
    if method == "typiclust":
        return select_typiclust(store, pool, budget, seed,
                                m=config.typicality_m, cluster_cap=config.cluster_cap)
    if method == "kmedoids":
        return select_kmedoids(store, pool, budget, kernel, seed=seed,
                               max_swaps=config.max_swaps, restarts=config.restarts,
                               warm_start=config.warm_start)
    if method in _UNCERTAINTY_MODE:
        if len(pool) == 0:
            # No annotations yet, so the probability surrogate is undefined;
            # fall back to a seeded random batch for the opening round.
            return select_random(store, pool, budget, seed)
        probs = soft_nn_probs(store, pool, store, config.temperature)
        return select_uncertain(probs, pool, budget, _UNCERTAINTY_MODE[method])
    raise ConfigError(f"unknown method {method!r}")


def run_loop(train_store, test_store, config):
    """Iterate select -> annotate -> evaluate for T rounds; one record per round.

    Fully deterministic given the config (wall_ms aside). If the unlabeled
    pool runs out mid-run the final round selects what remains and its
    record is marked truncated.
    """
    if not train_store.has_labels or not test_store.has_labels:
        raise DataError("both train and test stores need labels for the loop")
    kernel = config.kernel()
    pool = LabeledPool.empty()
    records = []
    test_labels = test_store.labels
    run_id = f"{config.method}-seed{config.seed}"
    # Coverage-state selectors keep their running maxima / covered mask
    # across the whole loop; one full candidate scan serves all T rounds.
    session = None
    if config.method == "maxherding":
        session = MaxHerdingSession(train_store, pool, kernel)
    elif config.method == "probcover" and train_store.n_samples <= _ADJACENCY_LIMIT:
        session = ProbCoverSession(train_store, pool, config.delta)
    for t in range(1, config.iterations + 1):
        remaining = train_store.n_samples - len(pool)
        if remaining == 0:
            break
        b = min(config.budget, remaining)
        seed_t = derive_seed(config.seed, t)
        tic = time.perf_counter()
        if session is not None:
            batch = session.select(b)
        else:
            batch = run_selector(config.method, train_store, pool, b, config, seed_t)
        wall_ms = (time.perf_counter() - tic) * 1e3
        pool = pool.extended(batch.indices, t)
        preds = nn1_predict(train_store, pool, test_store)
        accuracy = float(np.mean(preds == test_labels))
        cov = CoverageState(train_store, kernel, pool.indices).coverage()
        records.append(
            RunRecord(
                run_id=run_id,
                iteration=t,
                labeled_size=len(pool),
                accuracy=accuracy,
                coverage=cov,
                wall_ms=wall_ms,
                method=config.method,
                seed=config.seed,
                truncated=b < config.budget,
            )
        )
        if b < config.budget:
            break
    return records
