"""
Node centrality indices: in/out degree, closeness, betweenness, eigenvector and
PageRank. Each returns per-node values plus the network mean that enters the
feature matrix.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import diags

from .errors import DegenerateGraph, NoConvergence
from .graph_core import REVERSE, DirectedGraph, DistanceSummary, distance_summary

logger = logging.getLogger(__name__)

IN_DEGREE = "in_degree"
OUT_DEGREE = "out_degree"
CLOSENESS = "closeness"
BETWEENNESS = "betweenness"
EIGENVECTOR = "eigenvector"
PAGERANK = "pagerank"

CENTRALITY_KINDS = (IN_DEGREE, OUT_DEGREE, CLOSENESS, BETWEENNESS, EIGENVECTOR, PAGERANK)

# Sources per betweenness task; fixed so the summation order never depends on
# the worker count.
BRANDES_CHUNK = 128

EIGENVECTOR_MAX_ITER = 1000
EIGENVECTOR_TOL = 1e-10
PAGERANK_MAX_ITER = 200
PAGERANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CentralityVector:
    kind: str
    values: np.ndarray
    converged: bool = True
    iterations: int = 0

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values.size else 0.0


def degree_centrality(g: DirectedGraph, direction: str = "in") -> CentralityVector:
    if g.n < 2:
        raise DegenerateGraph("degree centrality needs at least 2 nodes")
    if direction == "in":
        return CentralityVector(IN_DEGREE, g.in_degree / (g.n - 1))
    if direction == "out":
        return CentralityVector(OUT_DEGREE, g.out_degree / (g.n - 1))
    raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")


def closeness_centrality(
    g: DirectedGraph, summary: Optional[DistanceSummary] = None
) -> CentralityVector:
    """Closeness over incoming distances, scaled by the reachable fraction.

    CC(u) = (r / (n - 1)) * (r / sum d(v, u)) with r the number of nodes that
    reach u; 0 when nothing reaches u.
    """
    if g.n < 2:
        raise DegenerateGraph("closeness needs at least 2 nodes")
    if summary is None or summary.direction != REVERSE:
        summary = distance_summary(g, REVERSE)
    reach = summary.reach_count.astype(float)
    values = np.zeros(g.n)
    ok = reach > 0
    values[ok] = (reach[ok] / (g.n - 1)) * (reach[ok] / summary.distance_sum[ok])
    return CentralityVector(CLOSENESS, values)


def _brandes_chunk(task: Tuple[Sequence[int], Sequence[Sequence[int]]]) -> np.ndarray:
    """Unnormalized betweenness contributions of a batch of BFS sources"""
    sources, out_adj = task
    n = len(out_adj)
    total = np.zeros(n)
    for s in sources:
        dist = [-1] * n
        sigma = [0] * n
        preds: List[List[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            next_dist = dist[v] + 1
            for w in out_adj[v]:
                if dist[w] < 0:
                    dist[w] = next_dist
                    queue.append(w)
                if dist[w] == next_dist:
                    sigma[w] += sigma[v]
                    preds[w].append(v)

        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                total[w] += delta[w]
    return total


def betweenness_centrality(g: DirectedGraph, workers: int = 1) -> CentralityVector:
    """Brandes accumulation over every source, normalized by (n-1)(n-2)"""
    if g.n < 3:
        raise DegenerateGraph("betweenness needs at least 3 nodes")
    out_adj = g.out_adj
    tasks = [
        (range(start, min(start + BRANDES_CHUNK, g.n)), out_adj)
        for start in range(0, g.n, BRANDES_CHUNK)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_brandes_chunk, tasks))
    else:
        partials = [_brandes_chunk(task) for task in tasks]

    raw = np.zeros(g.n)
    for partial in partials:
        raw += partial
    return CentralityVector(BETWEENNESS, raw / ((g.n - 1) * (g.n - 2)))


def eigenvector_centrality(
    g: DirectedGraph,
    incoming: bool = True,
    max_iter: int = EIGENVECTOR_MAX_ITER,
    tol: float = EIGENVECTOR_TOL,
    start: Optional[np.ndarray] = None,
) -> CentralityVector:
    """Dominant eigenvector of A^T (incoming) or A, unit Euclidean norm.

    Iterates x <- x + A^T x, which shares A^T's dominant eigenvector and does
    not oscillate on periodic graphs. The start vector defaults to uniform 1/n
    and only its direction matters.
    """
    if g.m == 0:
        raise DegenerateGraph("eigenvector centrality needs at least one edge")
    operator = g.reverse_adjacency if incoming else g.adjacency
    x = np.full(g.n, 1.0 / g.n) if start is None else np.asarray(start, dtype=float).copy()
    x /= np.linalg.norm(x)
    for iteration in range(1, max_iter + 1):
        x_next = x + operator @ x
        x_next /= np.linalg.norm(x_next)
        if np.max(np.abs(x_next - x)) < g.n * tol:
            return CentralityVector(EIGENVECTOR, x_next, iterations=iteration)
        x = x_next
    raise NoConvergence(EIGENVECTOR, max_iter, CentralityVector(EIGENVECTOR, x, False, max_iter))


def pagerank_centrality(
    g: DirectedGraph,
    damping: float = 0.85,
    max_iter: int = PAGERANK_MAX_ITER,
    tol: float = PAGERANK_TOL,
) -> CentralityVector:
    """PC(i) = (1-d)/N + d sum_{j -> i} PC(j)/L(j); dangling mass spreads uniformly"""
    if g.n < 1:
        raise DegenerateGraph("pagerank needs at least one node")
    if not 0.0 <= damping < 1.0:
        raise ValueError(f"damping must be in [0, 1), got {damping}")
    n = g.n
    out_degree = g.out_degree.astype(float)
    dangling = out_degree == 0
    inv_degree = np.divide(1.0, out_degree, out=np.zeros(n), where=~dangling)
    # transition^T so that x_next = transition_t @ x follows links forward
    transition_t = (diags(inv_degree) @ g.adjacency).transpose().tocsr()

    x = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        x_next = damping * (transition_t @ x + x[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(x_next - x).sum() < n * tol:
            return CentralityVector(PAGERANK, x_next / x_next.sum(), iterations=iteration)
        x = x_next
    raise NoConvergence(PAGERANK, max_iter, CentralityVector(PAGERANK, x / x.sum(), False, max_iter))


def with_fallback(error: NoConvergence) -> CentralityVector:
    """Last iterate of a power method that ran out of iterations"""
    logger.warning("%s; using the last iterate", error)
    return error.last_iterate
