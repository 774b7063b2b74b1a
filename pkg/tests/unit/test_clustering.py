#!/usr/bin/env python3
"""
Unit tests for k-means and HDBSCAN
"""

import itertools
import shutil
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from roadnet.clustering import (
    HDBSCAN,
    KMEANS,
    NOISE,
    _kmeans_plus_plus,
    _lloyd,
    cluster,
    core_distances,
    hdbscan,
    kmeans,
    read_assignment_csv,
    renumber,
    write_assignment_csv,
)
from roadnet.errors import TooFewPoints, TooManyClusters


def best_two_partition(points):
    """Lowest inertia over every split into two non-empty groups"""
    count = points.shape[0]
    best = np.inf
    for mask in itertools.product([False, True], repeat=count - 1):
        side = np.array((False,) + mask)
        if side.all() or not side.any():
            continue
        inertia = 0.0
        for group in (points[side], points[~side]):
            inertia += float(np.sum((group - group.mean(axis=0)) ** 2))
        best = min(best, inertia)
    return best


def kruskal_weight(weights):
    """Total weight of a minimum spanning tree of a complete weighted graph"""
    count = weights.shape[0]
    parent = list(range(count))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    total = 0.0
    for w, u, v in sorted((weights[u, v], u, v) for u in range(count) for v in range(u + 1, count)):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            total += w
    return total


def mutual_reachability_oracle(points, min_samples):
    count = points.shape[0]
    distances = np.array([[np.linalg.norm(points[i] - points[j]) for j in range(count)] for i in range(count)])
    core = [sorted(distances[i])[min_samples - 1] for i in range(count)]
    return np.array(
        [[max(distances[i, j], core[i], core[j]) for j in range(count)] for i in range(count)]
    )


@pytest.mark.unit
class TestKMeans(unittest.TestCase):
    """kmeans"""

    def test_two_pairs(self):
        """Two distant pairs split into the pairs with inertia 1"""
        points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        result = kmeans(points, 2, seed=0)
        self.assertEqual(result.labels.tolist(), [0, 0, 1, 1])
        self.assertAlmostEqual(result.inertia, 1.0)
        np.testing.assert_allclose(result.centroids, [[0.0, 0.5], [10.0, 0.5]])

    def test_optimal_two_partition(self):
        """Best-of-restarts inertia matches the exhaustive optimum"""
        for seed in range(4):
            rng = np.random.default_rng(seed)
            points = np.vstack([rng.normal(0, 1, size=(4, 2)), rng.normal(4, 1, size=(4, 2))])
            result = kmeans(points, 2, n_init=20, seed=seed)
            self.assertAlmostEqual(result.inertia, best_two_partition(points), places=9)

    def test_one_cluster_per_point(self):
        """K equal to the point count gives zero inertia"""
        points = np.array([[0.0], [3.0], [7.0]])
        result = kmeans(points, 3)
        self.assertEqual(result.inertia, 0.0)
        self.assertEqual(sorted(result.labels.tolist()), [0, 1, 2])

    def test_identical_points(self):
        """Duplicates with K=1 have zero inertia and the point as centroid"""
        result = kmeans(np.array([[2.0, 5.0]] * 4), 1)
        self.assertEqual(result.inertia, 0.0)
        np.testing.assert_array_equal(result.centroids, [[2.0, 5.0]])

    def test_seeded_determinism(self):
        """Same seed, same labels and centroids"""
        points = np.random.default_rng(4).normal(size=(12, 3))
        first = kmeans(points, 3, seed=17)
        second = kmeans(points, 3, seed=17)
        np.testing.assert_array_equal(first.labels, second.labels)
        np.testing.assert_array_equal(first.centroids, second.centroids)

    def test_labels_in_order_of_first_appearance(self):
        """The first point is always in cluster 0"""
        points = np.array([[9.0], [9.1], [0.0], [0.1], [4.0], [4.1]])
        result = kmeans(points, 3, seed=3)
        self.assertEqual(result.labels.tolist(), [0, 0, 1, 1, 2, 2])

    def test_lloyd_inertia_never_increases(self):
        """Inertia after each Lloyd update is no larger than before it"""
        for seed in range(5):
            rng = np.random.default_rng(seed)
            points = rng.normal(size=(20, 2))
            start = _kmeans_plus_plus(points, 4, rng)
            _, _, inertia, history = _lloyd(points, start, max_iter=100)
            self.assertTrue(np.all(np.diff(history) <= 1e-12))
            self.assertAlmostEqual(history[-1], inertia, places=12)

    def test_partition_survives_permutation(self):
        """Reordering well-separated input gives the same grouping"""
        rng = np.random.default_rng(8)
        centres = np.array([[0.0, 0.0], [20.0, 0.0], [0.0, 20.0]])
        points = np.vstack([centre + rng.normal(scale=0.3, size=(4, 2)) for centre in centres])
        order = rng.permutation(points.shape[0])

        def groups(labels, index):
            found = {}
            for position, label in enumerate(labels):
                found.setdefault(int(label), set()).add(int(index[position]))
            return sorted(sorted(group) for group in found.values())

        plain = kmeans(points, 3, seed=42)
        shuffled = kmeans(points[order], 3, seed=42)
        self.assertEqual(groups(shuffled.labels, order), groups(plain.labels, np.arange(points.shape[0])))
        self.assertAlmostEqual(shuffled.inertia, plain.inertia, places=9)

    def test_too_many_clusters(self):
        """K cannot exceed the point count"""
        with self.assertRaises(TooManyClusters):
            kmeans(np.zeros((2, 2)), 3)


@pytest.mark.unit
class TestHdbscan(unittest.TestCase):
    """hdbscan"""

    def test_two_blobs(self):
        """Two tight, far-apart triples form two clusters with no noise"""
        points = np.array([[0, 0], [0, 0.1], [0.1, 0], [10, 10], [10, 10.1], [10.1, 10]], dtype=float)
        result = hdbscan(points, min_cluster_size=2)
        self.assertEqual(result.labels.tolist(), [0, 0, 0, 1, 1, 1])
        self.assertEqual(result.noise_count, 0)

    def test_outlier_is_noise(self):
        """A far outlier is labelled noise"""
        points = np.array(
            [[0, 0], [0, 0.1], [0.1, 0], [10, 10], [10, 10.1], [10.1, 10], [50, -40]], dtype=float
        )
        result = hdbscan(points, min_cluster_size=2)
        self.assertEqual(result.labels[-1], NOISE)
        self.assertEqual(result.cluster_count, 2)

    def test_identical_points(self):
        """All-equal points form one cluster"""
        result = hdbscan(np.ones((5, 2)), min_cluster_size=2)
        self.assertEqual(result.labels.tolist(), [0] * 5)

    def test_uniform_scaling_keeps_labels(self):
        """Scaling every coordinate by the same factor leaves the labels unchanged"""
        points = np.random.default_rng(14).uniform(size=(14, 2))
        base = hdbscan(points, min_cluster_size=2)
        for factor in (8.0, 1000.0):
            np.testing.assert_array_equal(hdbscan(points * factor, min_cluster_size=2).labels, base.labels)

    def test_mst_weight_matches_kruskal(self):
        """Reported MST weight equals a Kruskal MST on mutual reachability"""
        for seed in range(3):
            points = np.random.default_rng(seed).uniform(size=(8, 2))
            for min_samples in (1, 2, 3):
                result = hdbscan(points, min_cluster_size=2, min_samples=min_samples)
                expected = kruskal_weight(mutual_reachability_oracle(points, min_samples))
                self.assertAlmostEqual(result.mst_weight, expected, places=12)

    def test_core_distance_counts_self(self):
        """min_samples=1 means a zero core distance"""
        distances = np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 2.0], [4.0, 2.0, 0.0]])
        self.assertEqual(core_distances(distances, 1).tolist(), [0.0, 0.0, 0.0])
        self.assertEqual(core_distances(distances, 2).tolist(), [1.0, 1.0, 2.0])

    def test_too_few_points(self):
        """Fewer points than min_cluster_size"""
        with self.assertRaises(TooFewPoints):
            hdbscan(np.zeros((2, 2)), min_cluster_size=3)


@pytest.mark.unit
class TestAssignment(unittest.TestCase):
    """renumber, cluster dispatch and the assignment CSV"""

    def setUp(self):
        """Set up test environment"""
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def test_renumber(self):
        """Labels renumber by first occurrence and noise is kept"""
        labels, order = renumber(np.array([4, -1, 2, 4, 2, 7]))
        self.assertEqual(labels.tolist(), [0, -1, 1, 0, 1, 2])
        self.assertEqual(order, [4, 2, 7])

    def test_dispatch(self):
        """cluster() routes to the named method"""
        points = np.array([[0.0], [0.1], [5.0], [5.1]])
        self.assertEqual(cluster(points, KMEANS, K=2).method, KMEANS)
        self.assertEqual(cluster(points, HDBSCAN, min_cluster_size=2).method, HDBSCAN)
        with self.assertRaises(ValueError):
            cluster(points, "dbscan")

    def test_members(self):
        """members() groups names by label"""
        result = kmeans(np.array([[0.0], [0.1], [5.0]]), 2, names=["a", "b", "c"], seed=1)
        self.assertEqual(result.members(), {0: ["a", "b"], 1: ["c"]})

    def test_csv(self):
        """Names, labels and method read back unchanged"""
        points = np.array([[0, 0], [0, 0.1], [0.1, 0], [10, 10], [10, 10.1], [10.1, 10], [50, -40]], dtype=float)
        result = hdbscan(points, min_cluster_size=2, names=list("abcdefg"))
        path = write_assignment_csv(result, self.test_dir / "clusters.csv")
        self.assertEqual(path.read_text().splitlines()[0], "network,method,label")
        again = read_assignment_csv(path)
        self.assertEqual(again.names, result.names)
        self.assertEqual(again.method, HDBSCAN)
        np.testing.assert_array_equal(again.labels, result.labels)


if __name__ == "__main__":
    unittest.main()
