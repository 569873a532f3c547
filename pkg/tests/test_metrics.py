"""Partition agreement scores and group-level interaction summaries."""

import numpy as np
import pytest

from spaceclust import (
    InteractionNetwork,
    Partition,
    adjusted_rand,
    between_group_mean,
    group_distance_matrix,
    within_group_mean,
)

from oracles import ari_pair_counting, set_partitions


class TestAdjustedRand:
    def test_identical_partitions_score_one(self):
        labels = np.array([0, 0, 1, 2, 1])
        assert adjusted_rand(labels, labels) == 1.0

    def test_relabeling_does_not_matter(self):
        a = np.array([0, 0, 1, 1, 2])
        b = np.array([5, 5, 3, 3, 9])
        assert adjusted_rand(a, b) == 1.0

    def test_one_group_against_singletons_scores_zero(self):
        a = np.zeros(6, dtype=int)
        b = np.arange(6)
        assert adjusted_rand(a, b) == 0.0

    def test_known_crossing_value(self):
        a = np.array([0, 0, 0, 1, 1, 1])
        b = np.array([0, 0, 1, 1, 2, 2])
        assert adjusted_rand(a, b) == pytest.approx(ari_pair_counting(a, b))
        assert adjusted_rand(a, b) == pytest.approx(0.2424242424242424)

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(3, 12))
            a = rng.integers(0, 3, size=n)
            b = rng.integers(0, 3, size=n)
            assert adjusted_rand(a, b) == pytest.approx(adjusted_rand(b, a))

    def test_accepts_partition_objects(self):
        a = Partition(np.array([0, 1, 0]))
        b = Partition(np.array([1, 0, 1]))
        assert adjusted_rand(a, b) == 1.0

    def test_matches_pair_counting_on_every_small_partition_pair(self):
        # exhaustive cross product through n=5; the acceptance suite pushes
        # the same comparison to n=8
        for n in range(2, 6):
            parts = [np.array(p) for p in set_partitions(n)]
            for a in parts:
                for b in parts:
                    assert adjusted_rand(a, b) == pytest.approx(
                        ari_pair_counting(a, b), abs=1e-12
                    )

    def test_errors(self):
        with pytest.raises(ValueError, match="different numbers"):
            adjusted_rand(np.array([0, 1]), np.array([0, 1, 2]))
        with pytest.raises(ValueError, match="at least 2"):
            adjusted_rand(np.array([0]), np.array([0]))


class TestGroupDistanceMatrix:
    def block(self):
        labels = np.array([0, 0, 0, 1, 1])
        vals = np.where(labels[:, None] == labels[None, :], 2.0, -1.0)
        np.fill_diagonal(vals, 0.0)
        return InteractionNetwork(vals), labels

    def test_block_means_are_exact(self):
        net, labels = self.block()
        out = group_distance_matrix(net, labels)
        assert out[0, 0] == pytest.approx(2.0)
        assert out[1, 1] == pytest.approx(2.0)
        assert out[0, 1] == pytest.approx(-1.0)
        assert out[1, 0] == pytest.approx(-1.0)

    def test_singleton_group_diagonal_is_nan(self):
        labels = np.array([0, 0, 1])
        vals = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
        out = group_distance_matrix(InteractionNetwork(vals), labels)
        assert np.isnan(out[1, 1])
        assert out[0, 0] == pytest.approx(1.0)
        assert out[0, 1] == pytest.approx(2.5)

    def test_empty_group_is_an_error(self):
        net, labels = self.block()
        with pytest.raises(ValueError, match="nonempty"):
            group_distance_matrix(net, Partition(labels, n_groups=3))

    def test_size_mismatch(self):
        net, _ = self.block()
        with pytest.raises(ValueError, match="number of nodes"):
            group_distance_matrix(net, np.array([0, 1]))


class TestPooledMeans:
    def test_within_and_between(self):
        labels = np.array([0, 0, 1, 1])
        vals = np.array(
            [
                [0.0, 4.0, 1.0, 1.0],
                [4.0, 0.0, 1.0, 1.0],
                [1.0, 1.0, 0.0, 6.0],
                [1.0, 1.0, 6.0, 0.0],
            ]
        )
        net = InteractionNetwork(vals)
        assert within_group_mean(net, labels) == pytest.approx(5.0)
        assert between_group_mean(net, labels) == pytest.approx(1.0)

    def test_degenerate_partitions_raise(self):
        net = InteractionNetwork(np.zeros((3, 3)))
        with pytest.raises(ValueError, match="between"):
            between_group_mean(net, np.array([0, 0, 0]))
        with pytest.raises(ValueError, match="within"):
            within_group_mean(net, np.array([0, 1, 2]))
