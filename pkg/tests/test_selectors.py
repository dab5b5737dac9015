"""Batch selection strategies."""

import numpy as np
import pytest

from covselect import (
    ConfigError,
    CoverageState,
    DataError,
    FeatureStore,
    Kernel,
    LabeledPool,
    MixtureSpec,
    ProbMatrix,
    StateError,
    generate_mixture,
    select_coreset,
    select_kernelherding,
    select_maxherding,
    select_probcover_graph,
    select_random,
    select_typiclust,
    select_uncertain,
)
from covselect.clustering import typicality_scores
from covselect.kernels import sq_dists

from conftest import random_store


def pool_of(*indices):
    return LabeledPool(np.asarray(indices, dtype=np.int64))


class TestRandom:
    def test_full_budget_is_complement(self):
        store = random_store(12, 2, seed=0)
        pool = pool_of(1, 5, 9)
        batch = select_random(store, pool, 9, seed=4)
        assert sorted(batch.indices) == [i for i in range(12) if i not in (1, 5, 9)]

    def test_same_seed_same_batch(self):
        store = random_store(30, 2, seed=1)
        a = select_random(store, LabeledPool.empty(), 7, seed=42)
        b = select_random(store, LabeledPool.empty(), 7, seed=42)
        assert a.indices == b.indices

    def test_zero_budget(self):
        store = random_store(5, 2, seed=2)
        assert select_random(store, LabeledPool.empty(), 0, seed=0).indices == []

    def test_budget_overflow_rejected(self):
        store = random_store(5, 2, seed=3)
        with pytest.raises(ConfigError):
            select_random(store, pool_of(0), 5, seed=0)


def naive_maxherding(store, kernel, pool, budget):
    """Full recomputation per candidate per pick (no incremental state)."""
    n = store.n_samples
    K = kernel.from_sq_dists(sq_dists(store.values, store.values))
    labeled = [int(i) for i in pool.indices]

    def coverage_of(idxs):
        if not idxs:
            return 0.0
        best = np.maximum.reduce(K[idxs])
        best = best.copy()
        best[idxs] = 1.0
        return float(best.mean())

    picks, gains = [], []
    cands = [c for c in range(n) if c not in labeled]
    for _ in range(budget):
        base = coverage_of(labeled + picks)
        cand_gains = np.array([coverage_of(labeled + picks + [c]) - base for c in cands])
        best = int(np.argmax(cand_gains))
        picks.append(cands[best])
        gains.append(float(cand_gains[best]))
        cands.pop(best)
    return picks, np.asarray(gains)


class TestMaxHerding:
    def test_single_unlabeled_point(self):
        store = random_store(4, 2, seed=4)
        pool = pool_of(0, 1, 2)
        batch = select_maxherding(store, pool, 1, Kernel("gaussian", 1.0))
        assert batch.indices == [3]

    def test_matches_naive_full_recomputation(self):
        for seed in range(4):
            store = random_store(60, 3, seed=seed)
            kernel = Kernel("gaussian", 0.8)
            pool = pool_of(2, 40) if seed % 2 else LabeledPool.empty()
            batch = select_maxherding(store, pool, 6, kernel)
            ref_picks, ref_gains = naive_maxherding(store, kernel, pool, 6)
            assert batch.indices == ref_picks
            np.testing.assert_allclose(batch.per_pick_gain, ref_gains, atol=1e-12)

    def test_gains_non_increasing(self):
        store = random_store(80, 4, seed=5)
        batch = select_maxherding(store, LabeledPool.empty(), 12, Kernel("laplace", 1.0))
        assert np.all(np.diff(batch.per_pick_gain) <= 1e-15)

    def test_two_component_toy_second_pick_in_minor(self):
        spec = MixtureSpec(
            components=(((0.0,), 1.1, 0.8), ((6.6,), 1.1, 0.2)), n_samples=2000, seed=0
        )
        store = generate_mixture(spec)
        labels = store._labels
        batch = select_maxherding(store, LabeledPool.empty(), 2, Kernel("gaussian", 1.0))
        assert labels[batch.indices[0]] == 0
        assert labels[batch.indices[1]] == 1


class TestKernelHerding:
    def test_first_pick_maximizes_mean_similarity(self):
        store = random_store(40, 3, seed=6)
        kernel = Kernel("gaussian", 1.0)
        batch = select_kernelherding(store, LabeledPool.empty(), 1, kernel)
        sims = kernel.from_sq_dists(sq_dists(store.values, store.values))
        assert batch.indices[0] == int(np.argmax(sims.mean(axis=1)))

    def test_identical_points_pick_in_index_order(self):
        store = FeatureStore(np.ones((6, 2)))
        batch = select_kernelherding(store, LabeledPool.empty(), 3, Kernel("gaussian", 1.0))
        assert batch.indices == [0, 1, 2]

    def test_two_component_toy_second_pick_in_major(self):
        spec = MixtureSpec(
            components=(((0.0,), 1.1, 0.8), ((6.6,), 1.1, 0.2)), n_samples=2000, seed=0
        )
        store = generate_mixture(spec)
        labels = store._labels
        batch = select_kernelherding(store, LabeledPool.empty(), 2, Kernel("gaussian", 1.0))
        assert labels[batch.indices[1]] == 0

    def test_pool_enters_penalty_unless_ignored(self):
        store = random_store(30, 2, seed=7)
        kernel = Kernel("gaussian", 0.5)
        pool = pool_of(3)
        with_pool = select_kernelherding(store, pool, 1, kernel)
        ignoring = select_kernelherding(store, pool, 1, kernel, ignore_pool=True)
        sims = kernel.from_sq_dists(sq_dists(store.values, store.values))
        cands = np.array([i for i in range(30) if i != 3])
        reward = sims[cands].mean(axis=1)
        assert ignoring.indices[0] == int(cands[np.argmax(reward)])
        scores = reward - sims[cands][:, 3] / 2.0
        assert with_pool.indices[0] == int(cands[np.argmax(scores)])


class TestProbCover:
    def test_tiny_radius_degenerates_to_index_order(self):
        # radius far below the minimum pairwise distance (but above the
        # float noise floor of the squared-distance expansion)
        store = random_store(10, 3, seed=8)
        batch = select_probcover_graph(store, LabeledPool.empty(), 4, 1e-6)
        assert batch.indices == [0, 1, 2, 3]

    def test_huge_radius_covers_in_one_pick(self):
        store = random_store(10, 3, seed=9)
        batch = select_probcover_graph(store, LabeledPool.empty(), 3, 1e6)
        # pick 1 covers everything; later picks fall to the lowest-index rule
        assert batch.indices[1:] == [i for i in range(10) if i != batch.indices[0]][:2]

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_tophat_maxherding(self, seed):
        rng = np.random.default_rng(seed)
        store = random_store(300, 4, seed=seed)
        delta = float(rng.uniform(0.8, 3.0))
        pool = pool_of(*rng.choice(300, size=int(rng.integers(0, 5)), replace=False))
        pc = select_probcover_graph(store, pool, 10, delta)
        mh = select_maxherding(store, pool, 10, Kernel("tophat", delta))
        assert pc.indices == mh.indices

    def test_blocked_path_matches_incremental(self, monkeypatch):
        import covselect.selectors as sel

        store = random_store(120, 3, seed=10)
        full = select_probcover_graph(store, LabeledPool.empty(), 6, 1.5)
        monkeypatch.setattr(sel, "_ADJACENCY_LIMIT", 0)
        blocked = select_probcover_graph(store, LabeledPool.empty(), 6, 1.5)
        assert full.indices == blocked.indices

    def test_bad_delta_rejected(self):
        store = random_store(5, 2, seed=11)
        with pytest.raises(ConfigError):
            select_probcover_graph(store, LabeledPool.empty(), 1, 0.0)


class TestCoreset:
    def test_farthest_point_on_a_line(self):
        store = FeatureStore(np.array([[0.0], [1.0], [10.0]]))
        batch = select_coreset(store, pool_of(0), 1, seed=0)
        assert batch.indices == [2]

    def test_last_remaining_point(self):
        store = random_store(6, 2, seed=12)
        batch = select_coreset(store, pool_of(0, 1, 2, 3, 4), 1, seed=0)
        assert batch.indices == [5]

    def test_min_distance_state_matches_naive(self):
        store = random_store(100, 4, seed=13)
        pool = pool_of(7, 54)
        batch = select_coreset(store, pool, 10, seed=0)
        selected = [7, 54]
        for pick in batch.indices:
            d = np.sqrt(sq_dists(store.values, store.values[selected]))
            mins = d.min(axis=1)
            cands = np.setdiff1d(np.arange(100), selected)
            expected = int(cands[np.argmax(mins[cands])])
            assert pick == expected
            selected.append(pick)

    def test_empty_pool_first_pick_seeded(self):
        store = random_store(50, 2, seed=14)
        a = select_coreset(store, LabeledPool.empty(), 3, seed=5)
        b = select_coreset(store, LabeledPool.empty(), 3, seed=5)
        assert a.indices == b.indices


def blob_instance(n_blobs, per_blob, seed=0, spread=0.05, spacing=20.0):
    rng = np.random.default_rng(seed)
    blocks = []
    for b in range(n_blobs):
        center = np.array([spacing * b, 0.0])
        blocks.append(center + spread * rng.standard_normal((per_blob, 2)))
    return FeatureStore(np.concatenate(blocks))


class TestTypiclust:
    def test_one_pick_per_blob_densest_point(self):
        store = blob_instance(3, 10, seed=15)
        batch = select_typiclust(store, LabeledPool.empty(), 3, seed=0, m=3)
        blobs = {0: range(0, 10), 1: range(10, 20), 2: range(20, 30)}
        picked_blobs = set()
        for pick in batch.indices:
            blob = pick // 10
            picked_blobs.add(blob)
            members = np.asarray(list(blobs[blob]))
            scores = typicality_scores(store.values[members], 3)
            assert pick == members[int(np.argmax(scores))]
        assert picked_blobs == {0, 1, 2}

    def test_cluster_cap_one_ranks_by_typicality(self):
        store = random_store(20, 2, seed=16)
        batch = select_typiclust(store, LabeledPool.empty(), 4, seed=0, m=5, cluster_cap=1)
        scores = typicality_scores(store.values, 5)
        order = np.lexsort((np.arange(20), -scores))
        assert batch.indices == [int(i) for i in order[:4]]

    def test_fill_rule_keeps_batch_size(self):
        store = blob_instance(2, 8, seed=17)
        pool = pool_of(0, 8)  # one labeled point in each cluster
        batch = select_typiclust(store, pool, 5, seed=0, m=3)
        assert len(batch.indices) == 5
        assert len(set(batch.indices)) == 5
        assert not set(batch.indices) & {0, 8}


class TestUncertainty:
    def test_one_hot_is_least_uncertain(self):
        probs = ProbMatrix(np.array([[1.0, 0.0], [0.5, 0.5], [0.7, 0.3]]))
        for mode in ("least_confident", "entropy", "margin"):
            batch = select_uncertain(probs, LabeledPool.empty(), 2, mode)
            assert 0 not in batch.indices, mode

    def test_uniform_row_is_most_uncertain(self):
        probs = ProbMatrix(np.array([[0.25] * 4, [0.9, 0.1, 0.0, 0.0], [0.4, 0.3, 0.2, 0.1]]))
        for mode in ("least_confident", "entropy", "margin"):
            batch = select_uncertain(probs, LabeledPool.empty(), 1, mode)
            assert batch.indices == [0], mode

    def test_two_row_example_all_modes_pick_first(self):
        probs = ProbMatrix(np.array([[0.6, 0.4], [0.9, 0.1]]))
        for mode in ("least_confident", "entropy", "margin"):
            batch = select_uncertain(probs, LabeledPool.empty(), 1, mode)
            assert batch.indices == [0], mode

    def test_bad_row_sum_rejected(self):
        with pytest.raises(DataError):
            ProbMatrix(np.array([[0.5, 0.6]]))

    def test_out_of_range_entries_rejected(self):
        with pytest.raises(DataError):
            ProbMatrix(np.array([[1.2, -0.2]]))

    def test_unknown_mode_rejected(self):
        probs = ProbMatrix(np.array([[0.5, 0.5]]))
        with pytest.raises(ConfigError):
            select_uncertain(probs, LabeledPool.empty(), 1, "wat")


DETERMINISTIC_SELECTORS = {
    "maxherding": lambda s, p, b: select_maxherding(s, p, b, Kernel("gaussian", 1.0)),
    "kernelherding": lambda s, p, b: select_kernelherding(s, p, b, Kernel("gaussian", 1.0)),
    "probcover": lambda s, p, b: select_probcover_graph(s, p, b, 1.3),
    "coreset": lambda s, p, b: select_coreset(s, p, b, seed=0),
}

# integer tie-free scores: picks must permute exactly
_EXACTLY_EQUIVARIANT = ("maxherding", "kernelherding", "coreset")


class TestSharedInvariants:
    @pytest.mark.parametrize("name", _EXACTLY_EQUIVARIANT)
    def test_permutation_equivariance(self, name):
        # continuous random data: argmax ties have probability zero, so the
        # permuted instance must yield the permuted picks
        select = DETERMINISTIC_SELECTORS[name]
        values = np.random.default_rng(18).standard_normal((40, 3))
        perm = np.random.default_rng(19).permutation(40)
        pool_orig = pool_of(3, 12)
        where = {int(orig): pos for pos, orig in enumerate(perm)}
        pool_perm = LabeledPool(np.asarray(sorted(where[i] for i in (3, 12))))
        base = select(FeatureStore(values), pool_orig, 6)
        permuted = select(FeatureStore(values[perm]), pool_perm, 6)
        assert [int(perm[i]) for i in permuted.indices] == base.indices

    def test_probcover_equivariant_up_to_count_ties(self):
        # hard-radius counts are integers, so ties are common and different
        # tie picks legitimately diverge downstream; the exactly invariant
        # parts are the first-pick gain and the multiset of first-scan gains
        values = np.random.default_rng(18).standard_normal((40, 3))
        perm = np.random.default_rng(19).permutation(40)
        kern = Kernel("tophat", 1.3)
        base = select_maxherding(FeatureStore(values), LabeledPool.empty(), 1, kern)
        permuted = select_maxherding(FeatureStore(values[perm]), LabeledPool.empty(), 1, kern)
        assert base.per_pick_gain[0] == permuted.per_pick_gain[0]
        from covselect.coverage import CoverageState

        g1 = CoverageState(FeatureStore(values), kern).gains(np.arange(40))
        g2 = CoverageState(FeatureStore(values[perm]), kern).gains(np.arange(40))
        np.testing.assert_array_equal(np.sort(g1), np.sort(g2))

    def test_batch_legality_all_selectors(self):
        store = random_store(25, 3, seed=20, labels=3)
        rng = np.random.default_rng(21)
        for _ in range(10):
            pool = pool_of(*rng.choice(25, size=int(rng.integers(0, 8)), replace=False))
            budget = int(rng.integers(0, 25 - len(pool) + 1))
            for name, select in DETERMINISTIC_SELECTORS.items():
                batch = select(store, pool, budget)
                assert len(batch.indices) == budget, name
                assert len(set(batch.indices)) == budget, name
                assert not set(batch.indices) & set(pool.indices.tolist()), name

    def test_selectors_never_touch_labels(self):
        from covselect import select_kmedoids, select_random, select_typiclust

        store = random_store(30, 3, seed=22, labels=3)
        pool = pool_of(1, 2)
        select_maxherding(store, pool, 3, Kernel("gaussian", 1.0))
        select_kernelherding(store, pool, 3, Kernel("gaussian", 1.0))
        select_probcover_graph(store, pool, 3, 1.0)
        select_coreset(store, pool, 3, seed=0)
        select_random(store, pool, 3, seed=0)
        select_typiclust(store, pool, 3, seed=0, m=4)
        select_kmedoids(store, pool, 3, Kernel("gaussian", 1.0), seed=0, max_swaps=10)
        assert store.label_reads == 0
