"""Batch selection strategies behind one interface.

Every selector takes the feature store, the current labeled pool, and a
budget, and returns an ordered SelectionBatch of exactly that many unlabeled
indices. Ties in every argmax break toward the lowest sample index, which
makes cross-implementation equivalence checks exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .clustering import kmeans, typicality_scores
from .coverage import CoverageState
from .errors import ConfigError, DataError, StateError
from .kernels import iter_candidate_sq_rows


@dataclass
class LabeledPool:
    """Ordered set of labeled sample indices with per-index acquisition round."""

    indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    acquisition_round: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.acquisition_round is None or len(self.acquisition_round) == 0:
            self.acquisition_round = np.zeros(self.indices.size, dtype=np.int64)
        else:
            self.acquisition_round = np.asarray(self.acquisition_round, dtype=np.int64)
        if self.acquisition_round.shape != self.indices.shape:
            raise StateError("acquisition_round must align with indices")
        if np.unique(self.indices).size != self.indices.size:
            raise StateError("labeled pool holds duplicate indices")

    def __len__(self):
        return int(self.indices.size)

    @classmethod
    def empty(cls):
        return cls()

    def extended(self, new_indices, round_tag):
        new_indices = np.asarray(new_indices, dtype=np.int64)
        return LabeledPool(
            np.concatenate([self.indices, new_indices]),
            np.concatenate(
                [self.acquisition_round, np.full(new_indices.size, round_tag, dtype=np.int64)]
            ),
        )


@dataclass
class SelectionBatch:
    """Ordered picks of one selection call, with per-pick coverage gains when known."""

    indices: list
    per_pick_gain: np.ndarray | None = None


@dataclass
class ProbMatrix:
    """N x C class probabilities; rows must sum to 1 within 1e-6."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 2:
            raise DataError("probability matrix must be 2-d")
        if np.any(self.probs < 0) or np.any(self.probs > 1):
            raise DataError("probabilities must lie in [0, 1]")
        sums = self.probs.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-6)
        if bad.size:
            raise DataError(f"probability row {bad[0]} sums to {sums[bad[0]]}, expected 1")


def _candidates(store, pool, budget):
    n = store.n_samples
    if pool.indices.size and (pool.indices.min() < 0 or pool.indices.max() >= n):
        raise IndexError("labeled pool index out of range")
    cands = np.setdiff1d(np.arange(n, dtype=np.int64), pool.indices, assume_unique=False)
    if budget < 0 or budget > cands.size:
        raise ConfigError(
            f"budget {budget} exceeds the {cands.size} unlabeled points available"
        )
    return cands


def select_random(store, pool, budget, seed):
    """Uniform without replacement from the unlabeled pool, seeded."""
    cands = _candidates(store, pool, budget)
    rng = np.random.default_rng(seed)
    picks = rng.choice(cands, size=budget, replace=False)
    return SelectionBatch(indices=[int(i) for i in picks])


class MaxHerdingSession:
    """Greedy coverage selection whose state persists across batches.

    The per-point running maxima make one candidate evaluation O(N), and
    because gains can only shrink as the labeled set grows, stale gains are
    valid upper bounds: after one full scan the argmax is found lazily (pop
    the best bound, refresh if stale, stop when the top is fresh). Heap
    order is (-gain, index), which reproduces the lowest-index tie rule of
    a full rescan exactly, within and across batches.
    """

    def __init__(self, store, pool, kernel):
        self.state = CoverageState(store, kernel, pool.indices)
        cands = np.setdiff1d(np.arange(store.n_samples, dtype=np.int64), pool.indices)
        self._remaining = cands.size
        self._heap = [(-g, int(c)) for g, c in zip(self.state.gains(cands), cands)]
        heapq.heapify(self._heap)
        self._stamp = {int(c): 0 for c in cands}
        self._picks_done = 0

    def select(self, budget):
        if budget < 0 or budget > self._remaining:
            raise ConfigError(
                f"budget {budget} exceeds the {self._remaining} unlabeled points available"
            )
        picks = []
        gains_trace = np.empty(budget, dtype=np.float64)
        for b in range(budget):
            while True:
                neg_gain, cand = heapq.heappop(self._heap)
                if self._stamp[cand] == self._picks_done:
                    picks.append(cand)
                    gains_trace[b] = -neg_gain
                    break
                self._stamp[cand] = self._picks_done
                heapq.heappush(self._heap, (-self.state.marginal_gain(cand), cand))
            self.state.add_point(picks[-1])
            self._picks_done += 1
            self._remaining -= 1
        return SelectionBatch(indices=picks, per_pick_gain=gains_trace)


def select_maxherding(store, pool, budget, kernel):
    """Greedy coverage maximization: each pick is the argmax of the marginal gain."""
    _candidates(store, pool, budget)
    return MaxHerdingSession(store, pool, kernel).select(budget)


def select_kernelherding(store, pool, budget, kernel, ignore_pool=False):
    """Greedy kernel-mean matching: reward minus overlap penalty per pick.

    Score of a candidate is mean similarity to the whole population minus
    the mean similarity to previously selected points (pool contents count
    as prior selections unless ignore_pool), with the penalty averaged over
    |selected| + 1.
    """
    cands = _candidates(store, pool, budget)
    n = store.n_samples
    reward = np.empty(cands.size, dtype=np.float64)
    for pos, rows in iter_candidate_sq_rows(store, cands):
        reward[pos] = kernel.from_sq_dists(rows).mean(axis=1)
    penalty_sum = np.zeros(cands.size, dtype=np.float64)
    n_selected = 0
    if not ignore_pool and pool.indices.size:
        for _, rows in iter_candidate_sq_rows(store, pool.indices):
            penalty_sum += kernel.from_sq_dists(rows).sum(axis=0)[cands]
        n_selected = pool.indices.size
    alive = np.ones(cands.size, dtype=bool)
    picks = []
    for _ in range(budget):
        score = reward - penalty_sum / (n_selected + 1)
        score[~alive] = -np.inf
        best = int(np.argmax(score))
        pick = int(cands[best])
        picks.append(pick)
        alive[best] = False
        for _, rows in iter_candidate_sq_rows(store, np.array([pick])):
            penalty_sum += kernel.from_sq_dists(rows[0])[cands]
        n_selected += 1
    return SelectionBatch(indices=picks)


# Candidate adjacency rows are materialized once per call below this point
# count; above it, per-pick blocked counting is used instead.
_ADJACENCY_LIMIT = 16_000


def select_probcover_graph(store, pool, budget, delta):
    """Greedy maximum coverage on the radius-delta neighborhood graph.

    Maintains a covered mask (seeded by the pool's delta-balls); each pick
    maximizes the count of uncovered points within delta of the candidate
    and then marks its own ball covered. A point covers itself, so with a
    radius below the minimum pairwise distance picks degenerate to index
    order over uncovered points.
    """
    if not delta > 0:
        raise ConfigError(f"delta must be positive, got {delta}")
    cands = _candidates(store, pool, budget)
    n = store.n_samples
    delta_sq = delta * delta
    covered = np.zeros(n, dtype=bool)
    if pool.indices.size:
        for _, rows in iter_candidate_sq_rows(store, pool.indices):
            covered |= (rows <= delta_sq).any(axis=0)
    if n <= _ADJACENCY_LIMIT:
        return ProbCoverSession(store, pool, delta).select(budget)
    return _probcover_blocked(store, cands, covered, budget, delta_sq)


class ProbCoverSession:
    """Hard-radius greedy coverage whose covered mask persists across batches.

    Candidate adjacency rows are materialized once; per-candidate uncovered
    counts are then maintained by subtracting the columns a pick newly
    covers, so a whole loop costs one adjacency pass plus O(N) per pick.
    """

    def __init__(self, store, pool, delta):
        if not delta > 0:
            raise ConfigError(f"delta must be positive, got {delta}")
        n = store.n_samples
        delta_sq = delta * delta
        self._covered = np.zeros(n, dtype=bool)
        if pool.indices.size:
            for _, rows in iter_candidate_sq_rows(store, pool.indices):
                self._covered |= (rows <= delta_sq).any(axis=0)
        self._cands = np.setdiff1d(np.arange(n, dtype=np.int64), pool.indices)
        self._adjacency = np.empty((self._cands.size, n), dtype=bool)
        for pos, rows in iter_candidate_sq_rows(store, self._cands):
            self._adjacency[pos] = rows <= delta_sq
        self._counts = (self._adjacency & ~self._covered[None, :]).sum(axis=1)
        self._alive = np.ones(self._cands.size, dtype=bool)

    def select(self, budget):
        remaining = int(self._alive.sum())
        if budget < 0 or budget > remaining:
            raise ConfigError(
                f"budget {budget} exceeds the {remaining} unlabeled points available"
            )
        picks = []
        for _ in range(budget):
            masked = np.where(self._alive, self._counts, -1)
            best = int(np.argmax(masked))
            picks.append(int(self._cands[best]))
            self._alive[best] = False
            newly = np.flatnonzero(self._adjacency[best] & ~self._covered)
            if newly.size:
                self._covered[newly] = True
                self._counts -= self._adjacency[:, newly].sum(axis=1)
        return SelectionBatch(indices=picks)


def _probcover_blocked(store, cands, covered, budget, delta_sq):
    """Per-pick blocked counting for populations too large to hold adjacency."""
    alive = np.ones(cands.size, dtype=bool)
    picks = []
    for _ in range(budget):
        live = cands[alive]
        counts = np.empty(live.size, dtype=np.int64)
        uncovered = ~covered
        for pos, rows in iter_candidate_sq_rows(store, live):
            counts[pos] = ((rows <= delta_sq) & uncovered[None, :]).sum(axis=1)
        best = int(np.argmax(counts))
        pick = int(live[best])
        picks.append(pick)
        alive[np.searchsorted(cands, pick)] = False
        for _, rows in iter_candidate_sq_rows(store, np.array([pick])):
            covered |= rows[0] <= delta_sq
    return SelectionBatch(indices=picks)


def select_coreset(store, pool, budget, seed):
    """Farthest-point (k-center) greedy with an incremental min-distance state.

    With an empty pool the first pick is seeded-uniform; afterwards each pick
    maximizes the distance to the nearest selected/labeled point.
    """
    cands = _candidates(store, pool, budget)
    n = store.n_samples
    min_dist = np.full(n, np.inf)
    if pool.indices.size:
        for _, rows in iter_candidate_sq_rows(store, pool.indices):
            np.minimum(min_dist, np.sqrt(rows).min(axis=0), out=min_dist)
    picks = []
    alive = np.ones(cands.size, dtype=bool)
    start = 0
    if not pool.indices.size and budget > 0:
        rng = np.random.default_rng(seed)
        pick = int(rng.choice(cands))
        picks.append(pick)
        alive[np.searchsorted(cands, pick)] = False
        for _, rows in iter_candidate_sq_rows(store, np.array([pick])):
            np.minimum(min_dist, np.sqrt(rows[0]), out=min_dist)
        start = 1
    for _ in range(start, budget):
        live = cands[alive]
        best = int(np.argmax(min_dist[live]))
        pick = int(live[best])
        picks.append(pick)
        alive[np.searchsorted(cands, pick)] = False
        for _, rows in iter_candidate_sq_rows(store, np.array([pick])):
            np.minimum(min_dist, np.sqrt(rows[0]), out=min_dist)
    return SelectionBatch(indices=picks)


def select_typiclust(store, pool, budget, seed, m=20, cluster_cap=500):
    """Cluster-then-densest-point selection.

    Runs k-means with k = min(|pool| + budget, cluster_cap, N), ranks
    clusters without labeled points by size (ties toward the lower cluster
    id), and takes the most typical unlabeled point of each. If there are
    fewer such clusters than the budget, the scan continues into covered
    clusters and then wraps around for further picks per cluster.
    """
    cands = _candidates(store, pool, budget)
    if budget == 0:
        return SelectionBatch(indices=[])
    n = store.n_samples
    k = min(len(pool) + budget, cluster_cap, n)
    result = kmeans(store.values, k, seed=seed)
    assignments = result.assignments
    sizes = np.bincount(assignments, minlength=k)
    has_label = np.zeros(k, dtype=bool)
    if pool.indices.size:
        has_label[np.unique(assignments[pool.indices])] = True
    order = sorted(range(k), key=lambda c: (has_label[c], -sizes[c], c))
    labeled_mask = np.zeros(n, dtype=bool)
    labeled_mask[pool.indices] = True
    picked_mask = np.zeros(n, dtype=bool)
    scores_by_cluster = {}
    picks = []
    while len(picks) < budget:
        progressed = False
        for c in order:
            if len(picks) >= budget:
                break
            members = np.flatnonzero(assignments == c)
            open_members = members[~labeled_mask[members] & ~picked_mask[members]]
            if open_members.size == 0:
                continue
            if c not in scores_by_cluster:
                m_eff = min(m, members.size - 1)
                scores_by_cluster[c] = dict(
                    zip(members.tolist(), typicality_scores(store.values[members], m_eff))
                )
            table = scores_by_cluster[c]
            scores = np.array([table[i] for i in open_members.tolist()])
            pick = int(open_members[int(np.argmax(scores))])
            picks.append(pick)
            picked_mask[pick] = True
            progressed = True
        if not progressed:
            raise StateError("typiclust could not fill the budget")
    return SelectionBatch(indices=picks)


UNCERTAINTY_MODES = ("least_confident", "entropy", "margin")


def select_uncertain(probs, pool, budget, mode):
    """Top-budget rows by an uncertainty score over class probabilities.

    least_confident scores by -p1, entropy by the Shannon entropy (natural
    log), and margin by -(p1 - p2); higher score means more uncertain.
    """
    if not isinstance(probs, ProbMatrix):
        probs = ProbMatrix(probs)
    if mode not in UNCERTAINTY_MODES:
        raise ConfigError(f"unknown uncertainty mode {mode!r}; expected one of {UNCERTAINTY_MODES}")
    p = probs.probs
    n = p.shape[0]
    if pool.indices.size and (pool.indices.min() < 0 or pool.indices.max() >= n):
        raise IndexError("labeled pool index out of range")
    cands = np.setdiff1d(np.arange(n, dtype=np.int64), pool.indices)
    if budget < 0 or budget > cands.size:
        raise ConfigError(f"budget {budget} exceeds the {cands.size} unlabeled points available")
    rows = p[cands]
    if mode == "least_confident":
        scores = -rows.max(axis=1)
    elif mode == "margin":
        if rows.shape[1] == 1:
            scores = -rows[:, 0]
        else:
            top2 = -np.partition(-rows, 1, axis=1)[:, :2]
            scores = -(top2[:, 0] - top2[:, 1])
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(rows > 0, rows * np.log(rows), 0.0)
        scores = -terms.sum(axis=1)
    ranking = np.lexsort((cands, -scores))
    picks = cands[ranking[:budget]]
    return SelectionBatch(indices=[int(i) for i in picks])
