#!/usr/bin/env python3
"""
Unit tests for PCA and ISOMAP
"""

import shutil
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.distance import pdist

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from roadnet.dimred import ISOMAP, PCA, classical_mds, isomap, pca, read_embedding_csv, reduce, write_embedding_csv
from roadnet.errors import DimensionTooLarge, TooFewPoints
from roadnet.feature_pipeline import FeatureMatrix


def stress(original, embedded):
    """Kruskal stress-1 between two distance vectors"""
    return np.sqrt(np.sum((original - embedded) ** 2) / np.sum(original ** 2))


@pytest.mark.unit
class TestPca(unittest.TestCase):
    """pca"""

    def test_collinear(self):
        """Rank-1 data: the first component explains everything"""
        F = FeatureMatrix.from_array([[t, 2 * t] for t in range(1, 6)])
        embedding = pca(F, d=2)
        np.testing.assert_allclose(embedding.explained_variance_ratio, [1.0, 0.0], atol=1e-9)

    def test_rotation_preserves_distances(self):
        """Full-rank projection is a rotation of the centred data"""
        rng = np.random.default_rng(3)
        values = rng.normal(size=(8, 3))
        embedding = pca(FeatureMatrix.from_array(values), d=3)
        np.testing.assert_allclose(pdist(embedding.coords), pdist(values), atol=1e-9)

    def test_reconstruction(self):
        """All components reproduce the centred data"""
        rng = np.random.default_rng(5)
        values = rng.uniform(size=(6, 4))
        embedding = pca(FeatureMatrix.from_array(values), d=4)
        rebuilt = embedding.coords @ embedding.components.T + embedding.mean
        np.testing.assert_allclose(rebuilt, values, atol=1e-9)

    def test_ratios_decrease_and_sum_to_one(self):
        """keep_all_ratios reports min(k, s) ratios summing to 1"""
        rng = np.random.default_rng(9)
        embedding = pca(FeatureMatrix.from_array(rng.normal(size=(5, 7))), d=2, keep_all_ratios=True)
        ratios = embedding.explained_variance_ratio
        self.assertEqual(ratios.size, 5)
        self.assertEqual(embedding.dimensions, 2)
        self.assertTrue(np.all(np.diff(ratios) <= 1e-12))
        self.assertAlmostEqual(ratios.sum(), 1.0, places=9)

    def test_translation_invariant(self):
        """Adding a constant row vector leaves the coordinates unchanged"""
        rng = np.random.default_rng(21)
        values = rng.uniform(size=(9, 4))
        shifted = values + np.array([3.0, -1.5, 0.25, 7.0])
        first = pca(FeatureMatrix.from_array(values), d=2)
        second = pca(FeatureMatrix.from_array(shifted), d=2)
        np.testing.assert_allclose(second.coords, first.coords, atol=1e-9)

    def test_sign_convention(self):
        """The largest loading of each component is positive"""
        rng = np.random.default_rng(1)
        embedding = pca(FeatureMatrix.from_array(rng.normal(size=(6, 3))), d=3)
        for column in embedding.components.T:
            self.assertGreater(column[np.argmax(np.abs(column))], 0)

    def test_dimension_too_large(self):
        """d cannot exceed min(k, s)"""
        with self.assertRaises(DimensionTooLarge):
            pca(FeatureMatrix.from_array(np.eye(3)), d=4)


@pytest.mark.unit
class TestIsomap(unittest.TestCase):
    """isomap and classical_mds"""

    def test_line_spacing(self):
        """Points on a line keep their spacing in the first coordinate"""
        F = FeatureMatrix.from_array([[float(t), 0.0] for t in range(5)])
        coords = isomap(F, d=1, k_neighbors=2).coords[:, 0]
        recovered = np.abs(coords - coords[0])
        np.testing.assert_allclose(recovered, [0, 1, 2, 3, 4], atol=1e-6)

    def test_curved_line_stress(self):
        """A sampled arc unrolls to 1-D with low stress against arc length"""
        angles = np.linspace(0, np.pi, 12)
        F = FeatureMatrix.from_array(np.column_stack([np.cos(angles), np.sin(angles)]))
        coords = isomap(F, d=1, k_neighbors=2).coords
        arc = angles[:, None] * 1.0
        self.assertLessEqual(stress(pdist(arc), pdist(coords)), 0.05)

    def test_equilateral_triangle(self):
        """Three equidistant points stay equidistant"""
        F = FeatureMatrix.from_array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        distances = pdist(isomap(F, d=2, k_neighbors=2).coords)
        np.testing.assert_allclose(distances, distances[0], atol=1e-6)

    def test_disconnected_graph_bridged(self):
        """Two far clusters are joined with a warning and still embed"""
        values = [[0.0], [0.1], [0.2], [10.0], [10.1], [10.2]]
        with self.assertLogs("roadnet.dimred", level="WARNING"):
            embedding = isomap(FeatureMatrix.from_array(values), d=1, k_neighbors=1)
        self.assertTrue(np.all(np.isfinite(embedding.coords)))

    def test_negative_eigenvalues_clamped(self):
        """Non-Euclidean distances give zero for clamped directions"""
        geodesics = np.array([[0, 1, 1, 1], [1, 0, 2, 2], [1, 2, 0, 2], [1, 2, 2, 0]], dtype=float)
        coords = classical_mds(geodesics, 4)
        self.assertTrue(np.all(np.isfinite(coords)))
        self.assertTrue(np.allclose(coords[:, -1], 0.0))

    def test_too_few_points(self):
        """k_neighbors must be below the point count"""
        with self.assertRaises(TooFewPoints):
            isomap(FeatureMatrix.from_array([[0.0], [1.0], [2.0]]), d=1, k_neighbors=3)


@pytest.mark.unit
class TestEmbeddingCsv(unittest.TestCase):
    """reduce and the embedding CSV"""

    def setUp(self):
        """Set up test environment"""
        self.test_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def test_pca_csv_with_sidecar(self):
        """Coordinates and explained variance read back exactly"""
        rng = np.random.default_rng(2)
        F = FeatureMatrix.from_array(rng.normal(size=(5, 3)), names=list("abcde"))
        embedding = reduce(F, PCA, d=2)
        path = write_embedding_csv(embedding, self.test_dir / "embedding.csv")
        self.assertTrue((self.test_dir / "embedding_variance.json").exists())
        again = read_embedding_csv(path)
        self.assertEqual(again.names, embedding.names)
        self.assertEqual(again.method, PCA)
        np.testing.assert_array_equal(again.coords, embedding.coords)
        np.testing.assert_array_equal(again.explained_variance_ratio, embedding.explained_variance_ratio)

    def test_isomap_csv(self):
        """ISOMAP embeddings have no sidecar"""
        F = FeatureMatrix.from_array([[float(t), t * 0.5] for t in range(6)])
        embedding = reduce(F, ISOMAP, d=2, k_neighbors=2)
        path = write_embedding_csv(embedding, self.test_dir / "embedding.csv")
        again = read_embedding_csv(path, method=ISOMAP)
        self.assertIsNone(again.explained_variance_ratio)
        np.testing.assert_array_equal(again.coords, embedding.coords)

    def test_unknown_method(self):
        """Only pca and isomap exist"""
        with self.assertRaises(ValueError):
            reduce(FeatureMatrix.from_array(np.eye(3)), "tsne")


if __name__ == "__main__":
    unittest.main()
