"""
K-means (k-means++ seeding, Lloyd iterations, best of n_init restarts) and
HDBSCAN (mutual reachability MST, condensed tree, excess-of-mass selection).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from .errors import TooFewPoints, TooManyClusters

logger = logging.getLogger(__name__)

KMEANS = "kmeans"
HDBSCAN = "hdbscan"
NOISE = -1


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    names: Tuple[str, ...]
    labels: np.ndarray
    method: str
    centroids: Optional[np.ndarray] = None
    inertia: Optional[float] = None
    mst_weight: Optional[float] = None

    @property
    def cluster_count(self) -> int:
        return len(set(self.labels.tolist()) - {NOISE})

    @property
    def noise_count(self) -> int:
        return int(np.sum(self.labels == NOISE))

    def members(self) -> Dict[int, List[str]]:
        groups: Dict[int, List[str]] = {}
        for name, label in zip(self.names, self.labels.tolist()):
            groups.setdefault(label, []).append(name)
        return groups


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")
    return points


def _default_names(count: int, names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    return tuple(names) if names is not None else tuple(str(i) for i in range(count))


def renumber(labels: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Relabel clusters 0, 1, ... by first occurrence; noise stays -1.

    Also returns the old label of each new label, in order.
    """
    mapping: Dict[int, int] = {}
    order: List[int] = []
    result = np.full(labels.shape, NOISE, dtype=np.int64)
    for i, label in enumerate(labels.tolist()):
        if label == NOISE:
            continue
        if label not in mapping:
            mapping[label] = len(order)
            order.append(label)
        result[i] = mapping[label]
    return result, order


# K-means


def _kmeans_plus_plus(points: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    count = points.shape[0]
    chosen = [int(rng.integers(count))]
    closest = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, K):
        total = closest.sum()
        if total <= 0:
            # every point coincides with a centre already
            candidate = int(rng.integers(count))
        else:
            candidate = int(rng.choice(count, p=closest / total))
        chosen.append(candidate)
        closest = np.minimum(closest, np.sum((points - points[candidate]) ** 2, axis=1))
    return points[chosen].copy()


def _assign(points: np.ndarray, centroids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    squared = cdist(points, centroids, "sqeuclidean")
    labels = np.argmin(squared, axis=1)
    return labels, squared[np.arange(points.shape[0]), labels]


def _lloyd(
    points: np.ndarray, centroids: np.ndarray, max_iter: int
) -> Tuple[np.ndarray, np.ndarray, float, List[float]]:
    """Lloyd iterations until the assignment stops changing.

    Returns labels, centroids, inertia and the inertia after every update.
    """
    K = centroids.shape[0]
    labels, squared = _assign(points, centroids)
    history = [float(squared.sum())]
    for _ in range(max_iter):
        centroids = centroids.copy()
        for j in range(K):
            members = labels == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
            else:
                # re-seed with the point worst served by its current centroid
                far = int(np.argmax(squared))
                centroids[j] = points[far]
                squared[far] = 0.0
        new_labels, squared = _assign(points, centroids)
        history.append(float(squared.sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    labels, squared = _assign(points, centroids)
    return labels, centroids, float(squared.sum()), history


def kmeans(
    points,
    K: int,
    n_init: int = 10,
    max_iter: int = 300,
    seed: int = 42,
    names: Optional[Sequence[str]] = None,
) -> ClusterAssignment:
    points = _as_points(points)
    count = points.shape[0]
    if K < 1 or K > count:
        raise TooManyClusters(f"cannot form {K} clusters from {count} points")

    best: Optional[Tuple[float, np.ndarray, np.ndarray]] = None
    for restart, child in enumerate(np.random.SeedSequence(seed).spawn(n_init)):
        rng = np.random.default_rng(child)
        labels, centroids, inertia, _ = _lloyd(points, _kmeans_plus_plus(points, K, rng), max_iter)
        logger.debug("k-means restart %d: inertia %.6g", restart, inertia)
        if best is None or inertia < best[0]:
            best = (inertia, labels, centroids)

    inertia, labels, centroids = best
    labels, order = renumber(labels)
    return ClusterAssignment(
        names=_default_names(count, names),
        labels=labels,
        method=KMEANS,
        centroids=centroids[order],
        inertia=inertia,
    )


# HDBSCAN


def core_distances(distances: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to the min_samples-th nearest point, the point itself included"""
    kth = min(min_samples, distances.shape[0]) - 1
    return np.sort(distances, axis=1)[:, kth]


def mutual_reachability(distances: np.ndarray, min_samples: int) -> np.ndarray:
    core = core_distances(distances, min_samples)
    return np.maximum(distances, np.maximum(core[:, None], core[None, :]))


def prim_mst(weights: np.ndarray) -> List[Tuple[int, int, float]]:
    """Minimum spanning tree of a complete graph as (u, v, weight) edges"""
    count = weights.shape[0]
    in_tree = np.zeros(count, dtype=bool)
    best = np.full(count, np.inf)
    parent = np.zeros(count, dtype=np.int64)
    in_tree[0] = True
    best[:] = weights[0]
    edges = []
    for _ in range(count - 1):
        candidates = np.where(in_tree, np.inf, best)
        v = int(np.argmin(candidates))
        edges.append((int(parent[v]), v, float(best[v])))
        in_tree[v] = True
        closer = (~in_tree) & (weights[v] < best)
        best[closer] = weights[v][closer]
        parent[closer] = v
    return edges


@dataclass
class _Cluster:
    birth: float
    parent: Optional[int]
    size: int
    children: List[int] = field(default_factory=list)
    stability: float = 0.0


def _single_linkage(count: int, mst: List[Tuple[int, int, float]]):
    """Merge list (left, right, distance, size) in scipy linkage numbering"""
    ordered = sorted(range(len(mst)), key=lambda i: (mst[i][2], i))
    parent = list(range(2 * count - 1))
    sizes = [1] * count + [0] * (count - 1)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merges = []
    for step, i in enumerate(ordered):
        u, v, weight = mst[i]
        left, right = find(u), find(v)
        node = count + step
        parent[left] = parent[right] = node
        sizes[node] = sizes[left] + sizes[right]
        merges.append((left, right, weight, sizes[node]))
    return merges


def _condense(count: int, merges, min_cluster_size: int):
    """Condensed cluster tree plus, for every point, (cluster it left, lambda)"""
    lambdas = [w for _, _, w, _ in merges if w > 0]
    # lambda = 1/distance; zero distances are capped just above the finest scale
    cap = 1.0 / (min(lambdas) * 1e-3) if lambdas else 1.0

    def lam(distance: float) -> float:
        return 1.0 / distance if distance > 0 else cap

    def leaves(node: int) -> List[int]:
        stack, found = [node], []
        while stack:
            current = stack.pop()
            if current < count:
                found.append(current)
            else:
                left, right, _, _ = merges[current - count]
                stack.extend((right, left))
        return found

    def size(node: int) -> int:
        return 1 if node < count else merges[node - count][3]

    clusters: List[_Cluster] = [_Cluster(birth=0.0, parent=None, size=count)]
    exits: Dict[int, Tuple[int, float]] = {}
    stack = [(2 * count - 2, 0)] if count > 1 else []
    if count == 1:
        exits[0] = (0, cap)

    while stack:
        node, cluster = stack.pop()
        left, right, distance, _ = merges[node - count]
        level = lam(distance)
        big = [child for child in (left, right) if size(child) >= min_cluster_size]

        if len(big) == 2:
            for child in (left, right):
                clusters[cluster].stability += size(child) * (level - clusters[cluster].birth)
                clusters.append(_Cluster(birth=level, parent=cluster, size=size(child)))
                new_id = len(clusters) - 1
                clusters[cluster].children.append(new_id)
                _descend(child, new_id, count, stack, exits, level, clusters)
            continue

        for child in (left, right):
            if child in big:
                _descend(child, cluster, count, stack, exits, level, clusters)
            else:
                for point in leaves(child):
                    exits[point] = (cluster, level)
                    clusters[cluster].stability += level - clusters[cluster].birth
    return clusters, exits


def _descend(node, cluster, count, stack, exits, level, clusters):
    if node < count:
        exits[node] = (cluster, level)
        clusters[cluster].stability += level - clusters[cluster].birth
    else:
        stack.append((node, cluster))


def _select(clusters: List[_Cluster]) -> List[int]:
    """Excess-of-mass selection: a parent wins only if it beats its selected descendants"""
    if not clusters[0].children:
        return [0]
    selected = {c: True for c in range(1, len(clusters))}
    subtree = {}
    for c in range(len(clusters) - 1, 0, -1):
        children_total = sum(subtree[child] for child in clusters[c].children)
        if clusters[c].children and clusters[c].stability <= children_total:
            selected[c] = False
            subtree[c] = children_total
        else:
            subtree[c] = clusters[c].stability
            stack = list(clusters[c].children)
            while stack:
                descendant = stack.pop()
                selected[descendant] = False
                stack.extend(clusters[descendant].children)
    return [c for c in range(1, len(clusters)) if selected[c]]


def hdbscan(
    points,
    min_cluster_size: int = 2,
    min_samples: Optional[int] = None,
    names: Optional[Sequence[str]] = None,
) -> ClusterAssignment:
    points = _as_points(points)
    count = points.shape[0]
    min_samples = min_cluster_size if min_samples is None else min_samples
    if min_cluster_size < 1 or min_samples < 1:
        raise ValueError("min_cluster_size and min_samples must be positive")
    if count < min_cluster_size:
        raise TooFewPoints(f"{count} points cannot hold a cluster of {min_cluster_size}")

    reachability = mutual_reachability(cdist(points, points), min_samples)
    mst = prim_mst(reachability)
    clusters, exits = _condense(count, _single_linkage(count, mst), min_cluster_size)
    selected = set(_select(clusters))

    raw = np.full(count, NOISE, dtype=np.int64)
    for point, (cluster, _) in exits.items():
        current: Optional[int] = cluster
        while current is not None and current not in selected:
            current = clusters[current].parent
        if current is not None:
            raw[point] = current
    labels, _ = renumber(raw)

    assignment = ClusterAssignment(
        names=_default_names(count, names),
        labels=labels,
        method=HDBSCAN,
        mst_weight=float(sum(weight for _, _, weight in mst)),
    )
    if assignment.cluster_count == 0:
        logger.warning("HDBSCAN labelled every point as noise")
    return assignment


def cluster(points, method: str, names=None, **params) -> ClusterAssignment:
    if method == KMEANS:
        return kmeans(points, names=names, **params)
    if method == HDBSCAN:
        return hdbscan(points, names=names, **params)
    raise ValueError(f"unknown clustering method {method!r}")


def write_assignment_csv(assignment: ClusterAssignment, path: Union[str, Path]) -> Path:
    frame = pd.DataFrame(
        {
            "network": list(assignment.names),
            "method": assignment.method,
            "label": assignment.labels.astype(np.int64),
        }
    )
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return Path(path)


def read_assignment_csv(path: Union[str, Path]) -> ClusterAssignment:
    frame = pd.read_csv(path, dtype={"network": str, "method": str, "label": np.int64}, encoding="utf-8")
    methods = set(frame["method"])
    return ClusterAssignment(
        names=tuple(frame["network"]),
        labels=frame["label"].to_numpy(dtype=np.int64),
        method=methods.pop() if len(methods) == 1 else "mixed",
    )
