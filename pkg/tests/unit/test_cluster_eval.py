#!/usr/bin/env python3
"""
Unit tests for the cluster validity indices and cluster profiles
"""

import math
import shutil
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from roadnet.cluster_eval import (
    calinski_harabasz_score,
    cluster_profiles,
    davies_bouldin_score,
    evaluate,
    silhouette_score,
    write_cluster_profiles,
)
from roadnet.clustering import ClusterAssignment
from roadnet.errors import InsufficientClusters
from roadnet.feature_pipeline import FEATURE_LABELS, read_features_csv

LINE = np.array([[0.0], [1.0], [10.0], [11.0]])
LINE_LABELS = np.array([0, 0, 1, 1])


def dist(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def silhouette_oracle(points, labels):
    """Per-point loop straight from the definition"""
    points = [list(p) for p in points]
    labels = list(labels)
    scores = []
    for i, p in enumerate(points):
        own = [j for j in range(len(points)) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(dist(p, points[j]) for j in own) / len(own)
        b = min(
            sum(dist(p, points[j]) for j in range(len(points)) if labels[j] == c)
            / labels.count(c)
            for c in set(labels)
            if c != labels[i]
        )
        scores.append((b - a) / max(a, b))
    return sum(scores) / len(scores)


def centroid(group):
    return [sum(column) / len(group) for column in zip(*group)]


def groups_of(points, labels):
    clusters = sorted(set(labels))
    return [[list(points[i]) for i in range(len(points)) if labels[i] == c] for c in clusters]


def calinski_harabasz_oracle(points, labels):
    groups = groups_of(points, labels)
    overall = centroid([list(p) for p in points])
    within = sum(dist(p, centroid(g)) ** 2 for g in groups for p in g)
    between = sum(len(g) * dist(centroid(g), overall) ** 2 for g in groups)
    n, k = len(points), len(groups)
    return between / within * (n - k) / (k - 1)


def davies_bouldin_oracle(points, labels):
    groups = groups_of(points, labels)
    centres = [centroid(g) for g in groups]
    spread = [sum(dist(p, c) for p in g) / len(g) for g, c in zip(groups, centres)]
    k = len(groups)
    return sum(
        max((spread[i] + spread[j]) / dist(centres[i], centres[j]) for j in range(k) if j != i) for i in range(k)
    ) / k


@pytest.mark.unit
class TestScores(unittest.TestCase):
    """silhouette, Calinski-Harabasz and Davies-Bouldin"""

    def test_silhouette_perfect_pairs(self):
        """Coincident pairs 10 apart score exactly 1"""
        points = np.array([[0.0], [0.0], [10.0], [10.0]])
        self.assertEqual(silhouette_score(points, [0, 0, 1, 1]), 1.0)

    def test_calinski_harabasz_line(self):
        """{0,1} and {10,11}: tr(W)=1, tr(B)=100, score 200"""
        self.assertAlmostEqual(calinski_harabasz_score(LINE, LINE_LABELS), 200.0, places=12)

    def test_calinski_harabasz_zero_within(self):
        """Two singletons at distinct points give the +inf sentinel"""
        self.assertEqual(calinski_harabasz_score([[0.0], [1.0]], [0, 1]), math.inf)

    def test_davies_bouldin_line(self):
        """{0,1} and {10,11}: spreads 0.5, separation 10, score 0.1"""
        self.assertAlmostEqual(davies_bouldin_score(LINE, LINE_LABELS), 0.1, places=12)

    def test_davies_bouldin_zero_diameter(self):
        """Zero-spread clusters at distinct points score 0"""
        self.assertEqual(davies_bouldin_score([[0.0], [0.0], [3.0]], [0, 0, 1]), 0.0)

    def test_single_cluster(self):
        """One cluster cannot be scored"""
        for score in (silhouette_score, calinski_harabasz_score, davies_bouldin_score):
            with self.assertRaises(InsufficientClusters):
                score(LINE, [0, 0, 0, 0])

    def test_formula_oracles(self):
        """All three scores match direct formula evaluation on random data"""
        for seed in range(5):
            rng = np.random.default_rng(seed)
            points = rng.normal(size=(9, 3))
            labels = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2])
            rng.shuffle(labels)
            self.assertAlmostEqual(silhouette_score(points, labels), silhouette_oracle(points, labels), places=12)
            self.assertAlmostEqual(
                calinski_harabasz_score(points, labels), calinski_harabasz_oracle(points, labels), places=9
            )
            self.assertAlmostEqual(
                davies_bouldin_score(points, labels), davies_bouldin_oracle(points, labels), places=12
            )

    def test_singleton_cluster_silhouette(self):
        """Members of singleton clusters contribute 0"""
        points = np.array([[0.0], [1.0], [10.0]])
        self.assertAlmostEqual(
            silhouette_score(points, [0, 0, 1]), silhouette_oracle(points, [0, 0, 1]), places=12
        )

    def test_davies_bouldin_coincident_centroids(self):
        """Two clusters sharing a centroid give the +inf sentinel"""
        points = np.array([[-1.0], [1.0], [-2.0], [2.0]])
        self.assertEqual(davies_bouldin_score(points, [0, 0, 1, 1]), math.inf)

    def test_all_singletons(self):
        """Every point alone: silhouette 0, Davies-Bouldin 0, Calinski-Harabasz +inf"""
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]])
        self.assertEqual(silhouette_score(points, [0, 1, 2]), 0.0)
        self.assertEqual(davies_bouldin_score(points, [0, 1, 2]), 0.0)
        self.assertEqual(calinski_harabasz_score(points, [0, 1, 2]), math.inf)

    def test_rigid_motion_invariance(self):
        """Rotating and translating the points leaves all three scores unchanged"""
        rng = np.random.default_rng(11)
        points = rng.normal(size=(12, 2))
        labels = np.array([0, 1, 2] * 4)
        angle = 0.7
        rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
        moved = points @ rotation.T + np.array([5.0, -3.0])
        for score in (silhouette_score, calinski_harabasz_score, davies_bouldin_score):
            self.assertAlmostEqual(score(moved, labels), score(points, labels), places=9)

    def test_noise_excluded(self):
        """Noise points are dropped before scoring and counted"""
        points = np.vstack([LINE, [[500.0]]])
        report = evaluate(points, [0, 0, 1, 1, -1])
        self.assertEqual(report.n_points_scored, 4)
        self.assertEqual(report.n_noise_excluded, 1)
        self.assertAlmostEqual(report.calinski_harabasz, 200.0, places=12)
        self.assertAlmostEqual(report.davies_bouldin, 0.1, places=12)


@pytest.mark.unit
class TestProfiles(unittest.TestCase):
    """cluster_profiles"""

    def setUp(self):
        """Set up test environment"""
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def write_features(self):
        rows = []
        for name, nodes, links, dac in (("a", 10, 20, 0.5), ("b", 20, 40, None), ("c", 30, 80, -0.5)):
            row = {label: 0.0 for label in FEATURE_LABELS}
            row.update(network=name, nodes=nodes, links=links, dac=dac)
            for label in ("diameter", "radius", "gscc_size", "gwcc_size", "scc_count", "wcc_count"):
                row[label] = 1
            rows.append(row)
        path = self.test_dir / "features.csv"
        pd.DataFrame(rows, columns=("network",) + FEATURE_LABELS).to_csv(path, index=False)
        return read_features_csv(path)

    def test_means_per_cluster(self):
        """Raw feature means per cluster, noise skipped, undefined values ignored"""
        features = self.write_features()
        assignment = ClusterAssignment(("a", "b", "c"), np.array([0, 0, -1]), "hdbscan")
        profiles = cluster_profiles(features, assignment)
        self.assertEqual(profiles["cluster"].tolist(), [0])
        self.assertEqual(profiles["size"].tolist(), [2])
        self.assertEqual(profiles["nodes"].tolist(), [15.0])
        self.assertEqual(profiles["links"].tolist(), [30.0])
        self.assertEqual(profiles["dac"].tolist(), [0.5])

    def test_written_columns(self):
        """cluster_profiles.csv starts with cluster,size then every feature"""
        features = self.write_features()
        assignment = ClusterAssignment(("a", "b", "c"), np.array([0, 1, 1]), "kmeans")
        path = write_cluster_profiles(cluster_profiles(features, assignment), self.test_dir / "profiles.csv")
        header = path.read_text().splitlines()[0].split(",")
        self.assertEqual(header, ["cluster", "size"] + list(FEATURE_LABELS))


if __name__ == "__main__":
    unittest.main()
