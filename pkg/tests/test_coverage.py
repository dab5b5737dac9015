"""Coverage state, marginal gains, and the impurity estimator."""

import itertools
import math

import numpy as np
import pytest

from covselect import (
    CoverageState,
    DataError,
    DomainError,
    FeatureStore,
    Kernel,
    StateError,
    blob_purity,
    estimate_impurity,
)

from conftest import random_store


def naive_coverage(store, kernel, labeled):
    """Independent recomputation: per-point max over labeled columns, then mean."""
    if not len(labeled):
        return 0.0
    best = np.zeros(store.n_samples)
    for idx in labeled:
        d = np.linalg.norm(store.values - store.values[idx], axis=1)
        best = np.maximum(best, kernel(d))
    return float(best.mean())


class TestCoverageValue:
    def test_empty_labeled_set(self):
        state = CoverageState(random_store(10, 2, seed=0), Kernel("gaussian", 1.0))
        assert state.coverage() == 0.0

    @pytest.mark.parametrize("family", ["gaussian", "tophat", "laplace", "cauchy", "studentt"])
    def test_full_labeled_set_is_one(self, family):
        store = random_store(12, 3, seed=1)
        state = CoverageState(store, Kernel(family, 0.7), range(12))
        assert state.coverage() == 1.0

    def test_three_colinear_points(self):
        store = FeatureStore(np.array([[0.0], [1.0], [2.0]]))
        state = CoverageState(store, Kernel("gaussian", 1.0), [1])
        expected = (2.0 * math.exp(-0.5) + 1.0) / 3.0
        assert state.coverage() == pytest.approx(expected, abs=1e-12)
        assert state.coverage() == pytest.approx(0.737687, abs=1e-6)

    def test_matches_naive_recomputation(self):
        store = random_store(60, 4, seed=2)
        kernel = Kernel("gaussian", 0.8)
        labeled = [3, 17, 44, 59]
        state = CoverageState(store, kernel, labeled)
        assert state.coverage() == pytest.approx(naive_coverage(store, kernel, labeled), abs=1e-12)


class TestAddPoint:
    def test_duplicate_coordinates_leave_coverage_unchanged(self):
        values = np.random.default_rng(3).standard_normal((20, 3))
        values[5] = values[11]
        store = FeatureStore(values)
        state = CoverageState(store, Kernel("gaussian", 1.0), [11])
        before = state.coverage()
        state.add_point(5)
        assert state.coverage() == pytest.approx(before, abs=1e-12)

    def test_add_to_empty_sets_kernel_column(self):
        store = random_store(15, 2, seed=4)
        kernel = Kernel("gaussian", 1.0)
        state = CoverageState(store, kernel)
        state.add_point(7)
        d = np.linalg.norm(store.values - store.values[7], axis=1)
        expected = kernel(d)
        expected[7] = 1.0
        np.testing.assert_allclose(state.maxima, expected, atol=1e-12)

    def test_incremental_matches_naive_elementwise(self):
        store = random_store(50, 3, seed=5)
        kernel = Kernel("gaussian", 1.2)
        state = CoverageState(store, kernel)
        added = []
        rng = np.random.default_rng(6)
        for idx in rng.choice(50, size=5, replace=False):
            state.add_point(int(idx))
            added.append(int(idx))
            naive = np.zeros(50)
            for j in added:
                d = np.linalg.norm(store.values - store.values[j], axis=1)
                naive = np.maximum(naive, kernel(d))
            naive[added] = 1.0
            np.testing.assert_allclose(state.maxima, naive, atol=1e-12)

    def test_duplicate_index_rejected(self):
        state = CoverageState(random_store(10, 2, seed=7), Kernel("gaussian", 1.0), [2])
        with pytest.raises(StateError):
            state.add_point(2)

    def test_maxima_never_decrease(self):
        store = random_store(30, 2, seed=8)
        state = CoverageState(store, Kernel("laplace", 1.0))
        prev = state.maxima.copy()
        for idx in (4, 9, 23):
            state.add_point(idx)
            assert np.all(state.maxima >= prev)
            prev = state.maxima.copy()

    def test_labeled_points_pinned_to_one(self):
        store = random_store(25, 4, seed=9)
        state = CoverageState(store, Kernel("laplace", 0.5), [1, 2])
        state.add_point(10)
        assert state.maxima[1] == 1.0 and state.maxima[2] == 1.0 and state.maxima[10] == 1.0


class TestMarginalGain:
    def test_labeled_candidate_gains_nothing(self):
        store = random_store(20, 3, seed=10)
        state = CoverageState(store, Kernel("gaussian", 1.0), [4, 8])
        assert state.marginal_gain(4) == 0.0

    def test_empty_state_gis_mean_similarity(self):
        store = random_store(20, 3, seed=11)
        kernel = Kernel("gaussian", 1.0)
        state = CoverageState(store, kernel)
        d = np.linalg.norm(store.values - store.values[6], axis=1)
        assert state.marginal_gain(6) == pytest.approx(float(kernel(d).mean()), abs=1e-12)

    def test_matches_coverage_difference_for_every_candidate(self):
        store = random_store(30, 3, seed=12)
        kernel = Kernel("gaussian", 0.9)
        labeled = [2, 19]
        state = CoverageState(store, kernel, labeled)
        base = state.coverage()
        for cand in range(30):
            direct = naive_coverage(store, kernel, labeled + [cand]) - base
            assert state.marginal_gain(cand) == pytest.approx(direct, abs=1e-12)

    def test_gains_vector_matches_scalar_path(self):
        store = random_store(40, 2, seed=13)
        state = CoverageState(store, Kernel("cauchy", 1.0), [0, 1])
        cands = np.arange(2, 40)
        gains = state.gains(cands)
        for pos, cand in enumerate(cands):
            assert gains[pos] == state.marginal_gain(int(cand))


class TestSubmodularity:
    def test_diminishing_gains_exhaustive(self):
        # every nested pair A subset of B and outside candidate x:
        # gain(A, x) >= gain(B, x) >= 0
        store = random_store(8, 2, seed=14)
        kernel = Kernel("gaussian", 1.0)
        universe = range(8)
        for b_set in itertools.chain.from_iterable(
            itertools.combinations(universe, r) for r in range(4)
        ):
            b_list = list(b_set)
            state_b = CoverageState(store, kernel, b_list)
            for a_size in range(len(b_list) + 1):
                for a_set in itertools.combinations(b_list, a_size):
                    state_a = CoverageState(store, kernel, list(a_set))
                    for x in universe:
                        if x in b_list:
                            continue
                        ga = state_a.marginal_gain(x)
                        gb = state_b.marginal_gain(x)
                        assert gb >= -1e-15
                        assert ga >= gb - 1e-12


class TestImpurity:
    def test_far_separated_clusters_are_pure(self):
        rng = np.random.default_rng(15)
        a = rng.standard_normal((20, 2)) * 0.1
        b = rng.standard_normal((20, 2)) * 0.1 + 100.0
        store = FeatureStore(np.vstack([a, b]))
        labels = np.repeat([0, 1], 20)
        assert estimate_impurity(store, Kernel("gaussian", 1.0), labels) == pytest.approx(
            0.0, abs=1e-200
        )

    def test_coincident_points_fully_impure(self):
        store = FeatureStore(np.zeros((10, 2)))
        labels = np.array([0, 1] * 5)
        assert estimate_impurity(store, Kernel("gaussian", 1.0), labels) == pytest.approx(
            1.0, abs=1e-9
        )

    def test_tophat_impurity_complements_blob_purity(self):
        store = random_store(40, 3, seed=16)
        labels = np.random.default_rng(17).integers(0, 3, size=40)
        for radius in (0.5, 1.0, 2.0, 3.5):
            imp = estimate_impurity(store, Kernel("tophat", radius), labels)
            pur = blob_purity(store, labels, radius)
            assert imp == pytest.approx(1.0 - pur, abs=1e-15)

    def test_single_class_rejected(self):
        store = random_store(10, 2, seed=18)
        with pytest.raises(DomainError):
            estimate_impurity(store, Kernel("gaussian", 1.0), np.zeros(10, dtype=int))

    def test_wrong_length_rejected(self):
        store = random_store(10, 2, seed=19)
        with pytest.raises(DataError):
            estimate_impurity(store, Kernel("gaussian", 1.0), np.zeros(9, dtype=int))
