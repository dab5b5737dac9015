"""Non-greedy coverage maximization: similarity k-medoids with frozen medoids.

The labeled pool is held fixed while a batch of free medoids is improved by
PAM-style swaps. Because every kernel has a constant unit diagonal,
maximizing the coverage objective is the same problem as kernel k-medoids on
the induced feature-space distances, so the swap search operates directly on
similarities; the caches below make one swap evaluation O(N).
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .errors import ConfigError, StateError
from .kernels import iter_candidate_sq_rows
from .selectors import SelectionBatch, _candidates, select_maxherding


def derive_seed(seed, stream):
    """A decorrelated 64-bit seed for sub-stream ``stream`` of ``seed``."""
    payload = struct.pack("<Qq", int(seed) & (2**64 - 1), int(stream))
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


class MedoidState:
    """Frozen + free medoids with per-point nearest / second-nearest similarity caches.

    ``sims`` holds one row of similarities per medoid (frozen rows first);
    s1/s2 are the best and second-best similarity per point and a1 is the
    sample index of the best medoid. ``objective`` always equals the
    coverage of frozen + free.
    """

    def __init__(self, store, kernel, frozen, free):
        self.store = store
        self.kernel = kernel
        self.frozen = [int(i) for i in frozen]
        self.free = [int(i) for i in free]
        overlap = set(self.frozen) & set(self.free)
        if overlap:
            raise StateError(f"frozen and free medoids overlap: {sorted(overlap)}")
        if len(set(self.free)) != len(self.free):
            raise StateError("duplicate free medoids")
        self.sims = np.empty((len(self.frozen) + len(self.free), store.n_samples))
        members = np.asarray(self.frozen + self.free, dtype=np.int64)
        for pos, rows in iter_candidate_sq_rows(store, members):
            self.sims[pos] = kernel.from_sq_dists(rows)
        self._refresh()

    def _medoid_samples(self):
        return np.asarray(self.frozen + self.free, dtype=np.int64)

    def _refresh(self):
        m = self.sims.shape[0]
        samples = self._medoid_samples()
        best_row = np.argmax(self.sims, axis=0)
        self.s1 = self.sims[best_row, np.arange(self.sims.shape[1])]
        self.a1 = samples[best_row]
        if m >= 2:
            self.s2 = np.partition(self.sims, m - 2, axis=0)[m - 2]
        else:
            self.s2 = np.zeros(self.sims.shape[1])

    @property
    def objective(self):
        return float(self.s1.mean())

    def _free_slot(self, out_medoid):
        try:
            return self.free.index(int(out_medoid))
        except ValueError:
            raise StateError(f"{out_medoid} is not a free medoid") from None

    def removal_base(self, out_medoid):
        """Per-point best similarity once ``out_medoid`` is removed."""
        self._free_slot(out_medoid)
        return np.where(self.a1 == int(out_medoid), self.s2, self.s1)

    def swap_deltas(self, out_medoid, candidates):
        """Objective change of swapping ``out_medoid`` for each candidate."""
        base = self.removal_base(out_medoid)
        obj = self.objective
        candidates = np.asarray(candidates, dtype=np.int64)
        deltas = np.empty(candidates.size)
        for pos, rows in iter_candidate_sq_rows(self.store, candidates):
            sims = self.kernel.from_sq_dists(rows)
            np.maximum(sims, base[None, :], out=sims)
            deltas[pos] = sims.mean(axis=1) - obj
        return deltas

    def apply_swap(self, out_medoid, in_candidate):
        slot = self._free_slot(out_medoid)
        in_candidate = int(in_candidate)
        if in_candidate in set(self.frozen) or in_candidate in set(self.free):
            raise StateError(f"{in_candidate} is already a medoid")
        row = len(self.frozen) + slot
        for _, rows in iter_candidate_sq_rows(self.store, np.array([in_candidate])):
            self.sims[row] = self.kernel.from_sq_dists(rows[0])
        self.free[slot] = in_candidate
        self._refresh()


def swap_delta(state, out_medoid, in_candidate):
    """Exact coverage change of one swap, from the nearest/second caches."""
    in_candidate = int(in_candidate)
    if in_candidate in set(state.frozen) or in_candidate in set(state.free):
        raise StateError(f"{in_candidate} is already a medoid")
    return float(state.swap_deltas(out_medoid, np.array([in_candidate]))[0])


def _improve(state, max_swaps):
    """Best-improvement swap passes until no strict gain or the swap cap.

    Tie rule within a pass: highest delta, then lowest free-medoid slot,
    then lowest candidate index (first argmax within each slot's scan).
    """
    n = state.store.n_samples
    swaps = 0
    trace = [state.objective]
    while swaps < max_swaps:
        taken = np.zeros(n, dtype=bool)
        taken[state.frozen] = True
        taken[state.free] = True
        candidates = np.flatnonzero(~taken)
        if candidates.size == 0:
            break
        best = (0.0, None, None)
        for medoid in state.free:
            deltas = state.swap_deltas(medoid, candidates)
            pos = int(np.argmax(deltas))
            if deltas[pos] > best[0]:
                best = (float(deltas[pos]), medoid, int(candidates[pos]))
        if best[1] is None:
            break
        state.apply_swap(best[1], best[2])
        trace.append(state.objective)
        swaps += 1
    return trace


def select_kmedoids(
    store,
    pool,
    budget,
    kernel,
    seed=0,
    max_swaps=None,
    restarts=1,
    warm_start=False,
):
    """Swap-optimize a batch of free medoids with the labeled pool frozen.

    Initialization is seeded-uniform from the unlabeled pool (or the greedy
    coverage batch when warm_start); each restart runs best-improvement swap
    passes and the highest-objective restart wins. max_swaps = 0 returns the
    initialization unchanged; the default cap is 100 x budget.
    """
    cands = _candidates(store, pool, budget)
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")
    if max_swaps is None:
        max_swaps = 100 * budget
    if max_swaps < 0:
        raise ConfigError(f"max_swaps must be >= 0, got {max_swaps}")
    if budget == 0:
        return SelectionBatch(indices=[])
    best_state = None
    for r in range(restarts):
        if warm_start and r == 0:
            init = select_maxherding(store, pool, budget, kernel).indices
        else:
            rng = np.random.default_rng(derive_seed(seed, r))
            init = rng.choice(cands, size=budget, replace=False)
        state = MedoidState(store, kernel, pool.indices, init)
        _improve(state, max_swaps)
        if best_state is None or state.objective > best_state.objective:
            best_state = state
    return SelectionBatch(indices=list(best_state.free))
