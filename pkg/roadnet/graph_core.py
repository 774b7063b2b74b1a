"""
Directed graph representation and the traversal primitives the metrics share.

Nodes are densely indexed 0..n-1 in ascending order of their original ids.
All distances are hop counts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

logger = logging.getLogger(__name__)

UNREACHABLE = -1

# Sources per shortest_path call; bounds memory at chunk * n floats.
DISTANCE_CHUNK = 256

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable simple directed graph G(V, E, A)"""

    node_ids: Tuple[int, ...]
    sources: np.ndarray
    targets: np.ndarray
    edge_lengths: Optional[np.ndarray] = None
    duplicates_collapsed: int = 0
    self_loops_dropped: int = 0
    # TNTP FIRST THRU NODE, original id; stored for callers, never applied
    first_thru_node: Optional[int] = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        lengths: Optional[Sequence[float]] = None,
        node_ids: Optional[Sequence[int]] = None,
    ) -> "DirectedGraph":
        """Build a graph over dense indices, dropping self-loops and repeated edges.

        The first occurrence of a repeated (u, v) pair wins, including its length.
        """
        seen = set()
        sources: List[int] = []
        targets: List[int] = []
        kept_lengths: List[float] = []
        duplicates = 0
        loops = 0

        for position, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                loops += 1
                continue
            if (u, v) in seen:
                duplicates += 1
                continue
            seen.add((u, v))
            sources.append(u)
            targets.append(v)
            if lengths is not None:
                kept_lengths.append(float(lengths[position]))

        if node_ids is None:
            node_ids = range(n)
        return cls(
            node_ids=tuple(int(i) for i in node_ids),
            sources=np.asarray(sources, dtype=np.int64),
            targets=np.asarray(targets, dtype=np.int64),
            edge_lengths=None if lengths is None else np.asarray(kept_lengths, dtype=float),
            duplicates_collapsed=duplicates,
            self_loops_dropped=loops,
        )

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return int(self.sources.size)

    @cached_property
    def adjacency(self) -> csr_matrix:
        """Binary adjacency A with A[i, j] = 1 iff (i, j) in E"""
        matrix = csr_matrix(
            (np.ones(self.m), (self.sources, self.targets)), shape=(self.n, self.n)
        )
        matrix.sort_indices()
        return matrix

    @cached_property
    def reverse_adjacency(self) -> csr_matrix:
        matrix = self.adjacency.transpose().tocsr()
        matrix.sort_indices()
        return matrix

    @cached_property
    def out_adj(self) -> Tuple[Tuple[int, ...], ...]:
        return _rows(self.adjacency)

    @cached_property
    def in_adj(self) -> Tuple[Tuple[int, ...], ...]:
        return _rows(self.reverse_adjacency)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.sources, minlength=self.n)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.n)

    def matrix(self, direction: str = FORWARD) -> csr_matrix:
        if direction == FORWARD:
            return self.adjacency
        if direction == REVERSE:
            return self.reverse_adjacency
        raise ValueError(f"direction must be {FORWARD!r} or {REVERSE!r}, got {direction!r}")

    def index_of(self, node_id: int) -> int:
        return self._index_map[node_id]

    @cached_property
    def _index_map(self) -> dict:
        return {node_id: index for index, node_id in enumerate(self.node_ids)}

    def subgraph(self, nodes: Iterable[int]) -> "DirectedGraph":
        """Induced subgraph on the given dense indices, re-indexed in ascending order"""
        keep = sorted(set(nodes))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        mask = (remap[self.sources] >= 0) & (remap[self.targets] >= 0)
        sources = remap[self.sources[mask]]
        targets = remap[self.targets[mask]]
        lengths = None if self.edge_lengths is None else self.edge_lengths[mask]
        return DirectedGraph(
            node_ids=tuple(self.node_ids[i] for i in keep),
            sources=sources,
            targets=targets,
            edge_lengths=lengths,
        )

    def to_networkx(self, directed: bool = True) -> nx.Graph:
        graph = nx.DiGraph() if directed else nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(zip(self.sources.tolist(), self.targets.tolist()))
        return graph


def _rows(matrix: csr_matrix) -> Tuple[Tuple[int, ...], ...]:
    indptr = matrix.indptr
    indices = matrix.indices.tolist()
    return tuple(
        tuple(indices[indptr[i]:indptr[i + 1]]) for i in range(matrix.shape[0])
    )


@dataclass(frozen=True)
class DistanceMatrixRow:
    source: int
    dist: np.ndarray

    def reachable(self) -> np.ndarray:
        return self.dist != UNREACHABLE


@dataclass(frozen=True)
class DistanceSummary:
    """Per-node aggregates of one all-sources BFS sweep.

    For the reverse direction, entry u aggregates the distances d(v, u) over all
    v != u that can reach u.
    """

    direction: str
    reach_count: np.ndarray
    distance_sum: np.ndarray
    inverse_sum: np.ndarray = field(repr=False)


def bfs_distances(
    g: DirectedGraph, source: int, direction: str = FORWARD
) -> DistanceMatrixRow:
    """Hop distances from source along out-edges (forward) or in-edges (reverse)"""
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} outside 0..{g.n - 1}")
    block = shortest_path(
        g.matrix(direction), method="D", directed=True, unweighted=True, indices=[source]
    )[0]
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(block)
    dist[finite] = block[finite].astype(np.int64)
    return DistanceMatrixRow(source=source, dist=dist)


def distance_rows(
    g: DirectedGraph,
    direction: str = FORWARD,
    sources: Optional[Sequence[int]] = None,
    chunk_size: int = DISTANCE_CHUNK,
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (source indices, distance block) pairs covering all requested sources.

    Blocks are float arrays with np.inf marking unreachable targets.
    """
    if sources is None:
        sources = np.arange(g.n)
    sources = np.asarray(sources, dtype=np.int64)
    matrix = g.matrix(direction)
    for start in range(0, sources.size, chunk_size):
        chunk = sources[start:start + chunk_size]
        block = shortest_path(
            matrix, method="D", directed=True, unweighted=True, indices=chunk
        )
        logger.debug("BFS %s sources %d..%d of %d", direction, start, start + chunk.size, sources.size)
        yield chunk, np.atleast_2d(block)


def distance_summary(g: DirectedGraph, direction: str = REVERSE) -> DistanceSummary:
    reach = np.zeros(g.n, dtype=np.int64)
    dist_sum = np.zeros(g.n, dtype=float)
    inv_sum = np.zeros(g.n, dtype=float)
    for chunk, block in distance_rows(g, direction):
        positive = np.isfinite(block) & (block > 0)
        reach[chunk] = positive.sum(axis=1)
        dist_sum[chunk] = np.where(positive, block, 0.0).sum(axis=1)
        inverse = np.zeros_like(block)
        np.divide(1.0, block, out=inverse, where=positive)
        inv_sum[chunk] = inverse.sum(axis=1)
    return DistanceSummary(
        direction=direction, reach_count=reach, distance_sum=dist_sum, inverse_sum=inv_sum
    )


def _components(g: DirectedGraph, connection: str) -> List[Tuple[int, ...]]:
    if g.n == 0:
        return []
    _, labels = connected_components(g.adjacency, directed=True, connection=connection)
    groups: dict = {}
    for node, label in enumerate(labels.tolist()):
        groups.setdefault(label, []).append(node)
    # Nodes were visited in ascending order, so each group is sorted and groups
    # appear ordered by their smallest member.
    return sorted((tuple(members) for members in groups.values()), key=lambda c: c[0])


def strongly_connected_components(g: DirectedGraph) -> List[Tuple[int, ...]]:
    return _components(g, "strong")


def weakly_connected_components(g: DirectedGraph) -> List[Tuple[int, ...]]:
    return _components(g, "weak")


def giant(components: Sequence[Tuple[int, ...]]) -> Tuple[int, ...]:
    """Largest component; ties go to the one with the smallest member"""
    if not components:
        return ()
    return max(components, key=len)


def undirected_projection(g: DirectedGraph) -> DirectedGraph:
    pairs = set(zip(g.sources.tolist(), g.targets.tolist()))
    pairs |= {(v, u) for u, v in pairs}
    return DirectedGraph.from_edges(g.n, sorted(pairs), node_ids=g.node_ids)
