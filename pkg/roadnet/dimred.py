"""
Projection of the scaled feature matrix to a few dimensions with PCA or ISOMAP.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.sparse.csgraph import connected_components, csgraph_from_dense, shortest_path
from scipy.spatial.distance import cdist

from .errors import DimensionTooLarge, TooFewPoints
from .feature_pipeline import FeatureMatrix

logger = logging.getLogger(__name__)

PCA = "pca"
ISOMAP = "isomap"


@dataclass(frozen=True, eq=False)
class Embedding:
    names: Tuple[str, ...]
    coords: np.ndarray
    method: str
    explained_variance_ratio: Optional[np.ndarray] = None
    neighbor_count: Optional[int] = None
    components: Optional[np.ndarray] = None
    mean: Optional[np.ndarray] = None

    @property
    def dimensions(self) -> int:
        return self.coords.shape[1]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive"""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _top_eigenpairs(matrix: np.ndarray, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """Largest d eigenpairs of a symmetric matrix, eigenvalues decreasing"""
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:d]
    return eigenvalues[order], _fix_signs(eigenvectors[:, order])


def pca(F: FeatureMatrix, d: int = 2, keep_all_ratios: bool = False) -> Embedding:
    """Project onto the top-d eigenvectors of the sample covariance matrix.

    With keep_all_ratios the explained-variance ratios of all min(k, s)
    components are reported even though only d are used for the coordinates.
    """
    k, s = F.shape
    if k < 2:
        raise TooFewPoints(f"PCA needs at least 2 rows, got {k}")
    if not 1 <= d <= min(k, s):
        raise DimensionTooLarge(f"cannot keep {d} components of a {k}x{s} matrix")

    mean = F.values.mean(axis=0)
    centered = F.values - mean
    covariance = centered.T @ centered / (k - 1)
    ratio_count = min(k, s) if keep_all_ratios else d
    eigenvalues, eigenvectors = _top_eigenpairs(covariance, max(d, ratio_count))
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    total = np.clip(np.trace(covariance), 0.0, None)
    ratios = eigenvalues / total if total > 0 else np.zeros_like(eigenvalues)
    components = eigenvectors[:, :d]
    return Embedding(
        names=F.names,
        coords=centered @ components,
        method=PCA,
        explained_variance_ratio=ratios[:ratio_count],
        components=components,
        mean=mean,
    )


def _neighbourhood_graph(distances: np.ndarray, k_neighbors: int) -> np.ndarray:
    """Symmetric k-NN weights with np.inf marking non-edges"""
    count = distances.shape[0]
    weights = np.full((count, count), np.inf)
    for i in range(count):
        order = np.argsort(distances[i], kind="stable")
        neighbours = [j for j in order if j != i][:k_neighbors]
        weights[i, neighbours] = distances[i, neighbours]
        weights[neighbours, i] = distances[i, neighbours]
    return weights


def _bridge_components(weights: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """Join components with the shortest Euclidean edge between them until connected"""
    while True:
        graph = csgraph_from_dense(weights, null_value=np.inf)
        count, labels = connected_components(graph, directed=False)
        if count == 1:
            return weights
        across = labels[:, None] != labels[None, :]
        masked = np.where(across, distances, np.inf)
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        logger.warning(
            "ISOMAP neighbourhood graph has %d components; bridging points %d and %d", count, i, j
        )
        weights[i, j] = weights[j, i] = distances[i, j]


def classical_mds(geodesics: np.ndarray, d: int) -> np.ndarray:
    """B = -1/2 J D^2 J; coords are the top eigenvectors scaled by sqrt(max(lambda, 0))"""
    count = geodesics.shape[0]
    centering = np.eye(count) - np.ones((count, count)) / count
    gram = -0.5 * centering @ (geodesics ** 2) @ centering
    eigenvalues, eigenvectors = _top_eigenpairs(gram, d)
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def isomap(F: FeatureMatrix, d: int = 2, k_neighbors: int = 5) -> Embedding:
    k, _ = F.shape
    if k < d + 1:
        raise TooFewPoints(f"ISOMAP to {d} dimensions needs at least {d + 1} points, got {k}")
    if not 1 <= k_neighbors < k:
        raise TooFewPoints(f"k_neighbors must be in [1, {k - 1}], got {k_neighbors}")

    distances = cdist(F.values, F.values)
    weights = _bridge_components(_neighbourhood_graph(distances, k_neighbors), distances)
    geodesics = shortest_path(
        csgraph_from_dense(weights, null_value=np.inf), method="D", directed=False
    )
    return Embedding(
        names=F.names,
        coords=classical_mds(geodesics, d),
        method=ISOMAP,
        neighbor_count=k_neighbors,
    )


def reduce(F: FeatureMatrix, method: str, d: int = 2, k_neighbors: int = 5) -> Embedding:
    if method == PCA:
        return pca(F, d, keep_all_ratios=True)
    if method == ISOMAP:
        return isomap(F, d, k_neighbors)
    raise ValueError(f"unknown reduction method {method!r}")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + "_variance.json")


def write_embedding_csv(embedding: Embedding, path: Union[str, Path]) -> Path:
    """`network,component_1,..` plus a JSON sidecar with PCA explained variance"""
    path = Path(path)
    columns = [f"component_{i + 1}" for i in range(embedding.dimensions)]
    frame = pd.DataFrame(embedding.coords, columns=columns)
    frame.insert(0, "network", list(embedding.names))
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")

    if embedding.explained_variance_ratio is not None:
        sidecar = {
            "method": embedding.method,
            "explained_variance_ratio": embedding.explained_variance_ratio.tolist(),
        }
        _sidecar(path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return path


def read_embedding_csv(path: Union[str, Path], method: Optional[str] = None) -> Embedding:
    path = Path(path)
    frame = pd.read_csv(path, float_precision="round_trip", dtype={"network": str}, encoding="utf-8")
    coords = frame.drop(columns=["network"]).to_numpy(dtype=float)
    ratios = None
    sidecar = _sidecar(path)
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        ratios = np.asarray(meta["explained_variance_ratio"])
        method = method or meta.get("method")
    return Embedding(
        names=tuple(frame["network"]),
        coords=coords,
        method=method or "unknown",
        explained_variance_ratio=ratios,
    )
