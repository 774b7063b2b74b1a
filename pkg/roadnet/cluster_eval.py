"""
Internal cluster validity indices: silhouette, Calinski-Harabasz and
Davies-Bouldin. Noise points (label -1) are left out of every score.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist
from sklearn import metrics

from .clustering import NOISE, ClusterAssignment
from .errors import InsufficientClusters
from .feature_pipeline import FEATURE_LABELS, NetworkFeatureVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterQualityReport:
    silhouette: float
    calinski_harabasz: float
    davies_bouldin: float
    n_points_scored: int
    n_noise_excluded: int

    def as_dict(self) -> dict:
        return asdict(self)


def _scored(points, labels) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    labels = np.asarray(labels)
    keep = labels != NOISE
    points, labels = points[keep], labels[keep]
    clusters = np.unique(labels)
    if clusters.size < 2:
        raise InsufficientClusters(f"need at least 2 clusters, found {clusters.size}")
    return points, labels, clusters


def _centroids(points: np.ndarray, labels: np.ndarray, clusters: np.ndarray) -> np.ndarray:
    return np.vstack([points[labels == c].mean(axis=0) for c in clusters])


def _all_singletons(points: np.ndarray, clusters: np.ndarray) -> bool:
    # sklearn needs fewer labels than samples
    return clusters.size == points.shape[0]


def silhouette_score(points, labels) -> float:
    """Mean of (b - a) / max(a, b); members of singleton clusters score 0"""
    points, labels, clusters = _scored(points, labels)
    if _all_singletons(points, clusters):
        return 0.0
    return float(metrics.silhouette_score(points, labels, metric="euclidean"))


def calinski_harabasz_score(points, labels) -> float:
    """tr(B) / tr(W) * (n - K) / (K - 1); +inf when the within dispersion is zero"""
    points, labels, clusters = _scored(points, labels)
    centroids = _centroids(points, labels, clusters)
    within = sum(float(np.sum((points[labels == c] - centroid) ** 2)) for centroid, c in zip(centroids, clusters))
    if within == 0.0:
        return float("inf")
    return float(metrics.calinski_harabasz_score(points, labels))


def davies_bouldin_score(points, labels) -> float:
    """Mean over clusters of max_j (s_i + s_j) / d_ij; coincident centroids give +inf"""
    points, labels, clusters = _scored(points, labels)
    separation = pdist(_centroids(points, labels, clusters))
    if np.any(separation == 0):
        return float("inf")
    if _all_singletons(points, clusters):
        return 0.0
    return float(metrics.davies_bouldin_score(points, labels))


def evaluate(points, labels) -> ClusterQualityReport:
    labels = np.asarray(labels)
    noise = int(np.sum(labels == NOISE))
    return ClusterQualityReport(
        silhouette=silhouette_score(points, labels),
        calinski_harabasz=calinski_harabasz_score(points, labels),
        davies_bouldin=davies_bouldin_score(points, labels),
        n_points_scored=int(labels.size - noise),
        n_noise_excluded=noise,
    )


def cluster_profiles(
    features: Sequence[NetworkFeatureVector], assignment: ClusterAssignment
) -> pd.DataFrame:
    """Mean raw feature values of each non-noise cluster"""
    by_name = {vector.network_name: vector for vector in features}
    rows: List[dict] = []
    for label, names in sorted(assignment.members().items()):
        if label == NOISE:
            continue
        table = pd.DataFrame([by_name[name].as_dict() for name in names], columns=list(FEATURE_LABELS))
        row = {"cluster": label, "size": len(names)}
        row.update(table.astype(float).mean(axis=0, skipna=True).to_dict())
        rows.append(row)
    return pd.DataFrame(rows, columns=["cluster", "size", *FEATURE_LABELS])


def write_cluster_profiles(profiles: pd.DataFrame, path: Union[str, Path]) -> Path:
    profiles.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return Path(path)
